#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "snnrpn/geometry.hpp"
#include "snnrpn/snn.hpp"
#include "snnrpn/types.hpp"

namespace snnrpn {

struct PipelineConfig {
    SensorGeometry sensor;
    int window = 16;
    int stride = 12;
    std::uint32_t fps = 30;
    // Frames cover at least this long; 0 means "up to the last event".
    double duration_s = 0.0;

    // Layer 1: one neuron per pixel, long refractory period, a single input
    // event crosses threshold.
    snn::NeuronParams refractory{10'000.0, 1.0, 0.0, 0.5, 0.0, 30'000};
    double w_in = 1.0;

    // Layer 2: one neuron per window, no refractory period. Each refractory
    // spike adds w_ff to the window's pooled conductance and kicks the
    // membrane by r_mem * g_sum.
    snn::NeuronParams conv{20'000.0, 1.0, 0.0, 3.0, 0.0, 0};
    double tau_g_us = 5'000.0;
    double w_ff = 1.0;

    // Layer 3 (optional): excitatory links to the 4-neighbourhood.
    bool lateral = false;
    double w_lat = 0.5;

    // Throws ConfigError describing the first violated constraint.
    void validate() const;
    ConvGeometry conv_geometry() const { return ConvGeometry(sensor, window, stride); }
};

// Fixed-length frame windows aligned to t = 0.
class FrameClock {
public:
    explicit FrameClock(std::uint32_t fps);

    std::uint32_t fps() const { return fps_; }
    std::int64_t frame_of(Timestamp t) const;
    Timestamp frame_start(std::int64_t k) const;  // first microsecond of frame k
    Timestamp frame_end(std::int64_t k) const { return frame_start(k + 1); }
    // Number of frames needed to cover duration_s, rounded up.
    std::int64_t frames_for(double duration_s) const;

private:
    std::uint32_t fps_;
};

class RefractoryLayer {
public:
    RefractoryLayer(SensorGeometry sensor, snn::NeuronParams params, double w_in);

    // Polarity is ignored. Returns the spike when the pixel's neuron fires.
    std::optional<PixelSpike> step(const DvsEvent& ev);

    const snn::NeuronState& neuron(int x, int y) const;
    const SensorGeometry& sensor() const { return sensor_; }

private:
    SensorGeometry sensor_;
    snn::NeuronParams params_;
    double w_in_;
    std::vector<snn::NeuronState> states_;
};

class ConvLayer {
public:
    ConvLayer(ConvGeometry geometry, snn::NeuronParams params, double tau_g_us, double w_ff,
              bool lateral, double w_lat);
    explicit ConvLayer(const PipelineConfig& cfg);

    // Feeds one refractory spike to every window covering it. Windows that
    // fire append one window-sized box to `out`. Returns the number of
    // windows updated.
    int step(const PixelSpike& spike, std::vector<ProposalBox>& out);
    std::vector<ProposalBox> step(const PixelSpike& spike);

    // Adds w_lat to the pooled conductance of the 4-neighbours of `fired`.
    // Neighbour thresholds are only checked on their next input. No-op when
    // lateral links are disabled. Returns the number of neighbours touched.
    int apply_lateral(WindowIndex fired, Timestamp t);

    const ConvGeometry& geometry() const { return geometry_; }
    const snn::NeuronState& neuron(WindowIndex w) const { return states_[flat(w)]; }
    const snn::ConductanceAccumulator& conductance(WindowIndex w) const {
        return conductances_[flat(w)];
    }
    bool lateral_enabled() const { return lateral_; }
    std::uint64_t lateral_updates() const { return lateral_updates_; }

private:
    std::size_t flat(WindowIndex w) const {
        return static_cast<std::size_t>(w.row) * static_cast<std::size_t>(geometry_.cols()) +
               static_cast<std::size_t>(w.col);
    }

    ConvGeometry geometry_;
    snn::NeuronParams params_;
    double w_ff_;
    bool lateral_;
    double w_lat_;
    std::vector<snn::NeuronState> states_;
    std::vector<snn::ConductanceAccumulator> conductances_;
    std::uint64_t lateral_updates_ = 0;
};

// Replaces every group of touching or overlapping boxes with its bounding
// box, repeating until no two outputs touch. Output is sorted by (y0, x0).
// The merged box carries the latest member timestamp.
std::vector<ProposalBox> cluster_frame(std::span<const ProposalBox> boxes);

// Gap-0 adjacency: overlap, shared edge, or shared corner.
bool boxes_touch(const Box& a, const Box& b);

struct FrameProposals {
    std::int64_t frame_index = 0;
    Timestamp t_start = 0;
    Timestamp t_end = 0;
    std::vector<ProposalBox> boxes;  // after clustering
};

struct RunCounters {
    std::uint64_t k_inp = 0;
    std::uint64_t k_ref = 0;
    std::uint64_t k_conv = 0;
    std::vector<std::uint64_t> proposals_per_frame;  // raw convolution boxes per frame

    // Modeled arithmetic, tallied at the instrumented sites.
    std::uint64_t ops_refractory = 0;
    std::uint64_t ops_conv = 0;
    std::uint64_t ops_cluster = 0;

    // What actually happened, for comparison with the model.
    std::uint64_t conv_window_updates = 0;
    std::uint64_t lateral_updates = 0;
    std::uint64_t cluster_pair_tests = 0;

    std::uint64_t ops_total() const { return ops_refractory + ops_conv + ops_cluster; }

    friend bool operator==(const RunCounters&, const RunCounters&) = default;
};

struct RunResult {
    std::vector<FrameProposals> frames;
    std::vector<std::vector<ProposalBox>> raw_boxes;  // per frame, before clustering
    RunCounters counters;
};

// Layer 1 only; validates ordering and bounds like run_pipeline.
std::vector<PixelSpike> denoise(std::span<const DvsEvent> stream, const PipelineConfig& cfg,
                                RunCounters* counters = nullptr);

// Throws StreamError naming the first unordered or out-of-bounds event.
RunResult run_pipeline(std::span<const DvsEvent> stream, const PipelineConfig& cfg);

// Number of frames a run over `stream` produces.
std::int64_t frame_count(std::span<const DvsEvent> stream, const PipelineConfig& cfg);

}  // namespace snnrpn
