#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "snnrpn/types.hpp"

// Deterministic synthetic address-event scenes with exact ground truth.
//
// Only moving intensity edges produce events. Each object carries a set of
// object-fixed edge points: its leading and trailing contour (perpendicular
// to each non-zero velocity component) plus optional interior texture
// points. Every edge point emits events at `edge_rate_hz` on average while
// the object moves, at the sensor pixel it currently occupies. Emission is a
// compound Poisson process: arrivals come at edge_rate_hz / burst_mean and
// each one is a burst of 1 + Poisson(burst_mean - 1) events at one pixel,
// spread uniformly over `burst_span_us`. A burst mean of 1 gives a plain
// Poisson stream. Objects wrap around: along x the position cycles through
// [-w, width), so an object leaves completely before re-entering on the
// other side.
namespace snnrpn::synth {

struct ObjectSpec {
    std::string label;
    int w = 40;
    int h = 20;
    double x0 = 0.0;  // top-left at t = 0, pixels
    double y0 = 0.0;
    double vx = 0.0;  // pixels per second
    double vy = 0.0;
    double edge_rate_hz = 100.0;
    double texture_density = 0.0;  // fraction of interior pixels that are texture edges
    double burst_mean = 1.0;       // mean events per arrival, >= 1
    double burst_span_us = 1000.0;
};

struct SceneSpec {
    SensorGeometry sensor;
    double duration_s = 1.0;
    std::uint32_t fps = 30;
    std::vector<ObjectSpec> objects;
    double noise_rate_hz = 0.0;  // background events per pixel per second
    std::uint64_t seed = 1;

    // Throws ConfigError.
    void validate() const;
};

struct SynthOutput {
    std::vector<DvsEvent> events;    // sorted by (t, y, x, polarity)
    std::vector<GroundTruthBox> gt;  // one per visible object per frame
    std::int64_t frames = 0;
};

// Ground truth is the object's extent at each frame midpoint, clipped to the
// sensor; frames where less than half the object is on the sensor have no
// box for it.
SynthOutput gen_scene(const SceneSpec& spec);

// Expected number of generated events (noise plus on-sensor edge emission),
// integrated numerically over the scene duration.
double expected_event_count(const SceneSpec& spec);

// Object extent at time t_s (unclipped; may extend past the sensor).
Box object_extent(const ObjectSpec& obj, const SensorGeometry& sensor, double t_s);

struct PresetInfo {
    std::string name;
    double duration_s;
    std::int64_t events;  // recording this preset mimics
    int car_w;
    int car_h;
    bool night;
};

const std::vector<PresetInfo>& presets();

// Throws std::invalid_argument for unknown names.
SceneSpec preset(std::string_view name, std::uint64_t seed = 1);

// Several well-separated objects; used for baseline comparisons.
SceneSpec multi_object_scene(std::uint64_t seed = 1, double duration_s = 10.0);

}  // namespace snnrpn::synth
