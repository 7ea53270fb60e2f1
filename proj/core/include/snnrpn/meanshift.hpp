#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "snnrpn/pipeline.hpp"
#include "snnrpn/types.hpp"

// Event-based mean-shift cluster tracker, run on denoised spikes as the
// comparison baseline for the spiking proposal network.
namespace snnrpn::meanshift {

struct MsConfig {
    double radius = 12.0;          // assignment radius and half box side, pixels
    double eta = 0.05;             // center mixing factor in (0, 1]
    double tau_act_us = 50'000.0;  // activity decay constant
    double act_threshold = 5.0;    // minimum activity to emit a box
    int max_clusters = 16;

    void validate() const;
};

struct MsCluster {
    double cx = 0.0;
    double cy = 0.0;
    double radius = 0.0;
    double activity = 0.0;
    Timestamp t_last = 0;
};

// Instrumented operation tally, using the same per-update accounting style as
// the network's cost model.
struct MsCounters {
    std::uint64_t spikes = 0;
    std::uint64_t cluster_visits = 0;  // decay + distance per live cluster per spike
    std::uint64_t shifts = 0;
    std::uint64_t seeds = 0;
    std::uint64_t evictions = 0;

    static constexpr std::uint64_t kOpsPerVisit = 8;  // exp-decay (3) + squared distance (5)
    static constexpr std::uint64_t kOpsPerShift = 7;  // 2 x (sub, mul, add) + increment
    static constexpr std::uint64_t kOpsPerSeed = 4;

    std::uint64_t ops() const {
        return cluster_visits * kOpsPerVisit + shifts * kOpsPerShift + seeds * kOpsPerSeed;
    }
};

class Tracker {
public:
    Tracker(SensorGeometry sensor, MsConfig cfg);

    // Decays every cluster to s.t, then either shifts the nearest cluster
    // within the radius (ties go to the lower index) or seeds a new one,
    // evicting the least active cluster when at capacity.
    void step(const PixelSpike& s);

    // Boxes of side 2 * radius around every cluster whose activity, decayed
    // to t_end, is at least act_threshold; clipped to the sensor.
    std::vector<ProposalBox> emit(Timestamp t_end) const;

    const std::vector<MsCluster>& clusters() const { return clusters_; }
    const MsCounters& counters() const { return counters_; }
    const MsConfig& config() const { return cfg_; }

private:
    double decayed(const MsCluster& c, Timestamp t) const;

    SensorGeometry sensor_;
    MsConfig cfg_;
    std::vector<MsCluster> clusters_;
    MsCounters counters_;
};

struct MsRunResult {
    std::vector<FrameProposals> frames;
    MsCounters counters;
};

// Drives a tracker over denoised spikes and emits at the end of every frame
// window. `n_frames` frames are produced.
MsRunResult run_meanshift(std::span<const PixelSpike> spikes, SensorGeometry sensor,
                          const MsConfig& cfg, std::uint32_t fps, std::int64_t n_frames);

// Memory model: refractory layer state plus five b-bit variables per cluster.
std::int64_t mem_bits(SensorGeometry sensor, const MsConfig& cfg, std::int64_t bits_per_var);

}  // namespace snnrpn::meanshift
