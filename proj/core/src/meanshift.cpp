#include "snnrpn/meanshift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace snnrpn::meanshift {

void MsConfig::validate() const {
    if (!(radius > 0.0)) {
        throw ConfigError("mean-shift radius must be positive");
    }
    if (!(eta > 0.0 && eta <= 1.0)) {
        throw ConfigError("mean-shift eta must lie in (0, 1]");
    }
    if (!(tau_act_us > 0.0)) {
        throw ConfigError("mean-shift activity time constant must be positive");
    }
    if (act_threshold < 0.0) {
        throw ConfigError("mean-shift activity threshold must be non-negative");
    }
    if (max_clusters <= 0) {
        throw ConfigError("mean-shift capacity must be positive");
    }
}

Tracker::Tracker(SensorGeometry sensor, MsConfig cfg) : sensor_(sensor), cfg_(cfg) {
    sensor_.validate();
    cfg_.validate();
    clusters_.reserve(static_cast<std::size_t>(cfg_.max_clusters));
}

double Tracker::decayed(const MsCluster& c, Timestamp t) const {
    if (t <= c.t_last) {
        return c.activity;
    }
    return c.activity * std::exp(-static_cast<double>(t - c.t_last) / cfg_.tau_act_us);
}

void Tracker::step(const PixelSpike& s) {
    ++counters_.spikes;
    const double ex = s.x;
    const double ey = s.y;
    const double r2 = cfg_.radius * cfg_.radius;

    std::size_t best = clusters_.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters_.size(); ++i) {
        auto& c = clusters_[i];
        c.activity = decayed(c, s.t);
        c.t_last = std::max(c.t_last, s.t);
        ++counters_.cluster_visits;
        const double dx = ex - c.cx;
        const double dy = ey - c.cy;
        const double d2 = dx * dx + dy * dy;
        // Strict comparison keeps the lower index on ties.
        if (d2 <= r2 && d2 < best_d2) {
            best = i;
            best_d2 = d2;
        }
    }

    if (best < clusters_.size()) {
        auto& c = clusters_[best];
        c.cx += cfg_.eta * (ex - c.cx);
        c.cy += cfg_.eta * (ey - c.cy);
        c.activity += 1.0;
        ++counters_.shifts;
        return;
    }

    const MsCluster fresh{ex, ey, cfg_.radius, 1.0, s.t};
    ++counters_.seeds;
    if (clusters_.size() < static_cast<std::size_t>(cfg_.max_clusters)) {
        clusters_.push_back(fresh);
        return;
    }
    std::size_t weakest = 0;
    for (std::size_t i = 1; i < clusters_.size(); ++i) {
        if (clusters_[i].activity < clusters_[weakest].activity) {
            weakest = i;
        }
    }
    clusters_[weakest] = fresh;
    ++counters_.evictions;
}

std::vector<ProposalBox> Tracker::emit(Timestamp t_end) const {
    std::vector<ProposalBox> out;
    for (const auto& c : clusters_) {
        if (decayed(c, t_end) < cfg_.act_threshold) {
            continue;
        }
        const int side = static_cast<int>(std::lround(2.0 * c.radius));
        const int x0 = static_cast<int>(std::lround(c.cx - c.radius));
        const int y0 = static_cast<int>(std::lround(c.cy - c.radius));
        Box b{std::max(0, x0), std::max(0, y0), std::min(sensor_.width, x0 + side),
              std::min(sensor_.height, y0 + side)};
        if (b.empty()) {
            continue;
        }
        out.push_back(ProposalBox{b, c.t_last});
    }
    return out;
}

MsRunResult run_meanshift(std::span<const PixelSpike> spikes, SensorGeometry sensor,
                          const MsConfig& cfg, std::uint32_t fps, std::int64_t n_frames) {
    const FrameClock clock(fps);
    Tracker tracker(sensor, cfg);
    MsRunResult result;
    result.frames.reserve(static_cast<std::size_t>(std::max<std::int64_t>(n_frames, 0)));

    std::size_t next = 0;
    for (std::int64_t k = 0; k < n_frames; ++k) {
        const Timestamp t_end = clock.frame_end(k);
        while (next < spikes.size() && spikes[next].t < t_end) {
            tracker.step(spikes[next]);
            ++next;
        }
        FrameProposals fp;
        fp.frame_index = k;
        fp.t_start = clock.frame_start(k);
        fp.t_end = t_end;
        fp.boxes = tracker.emit(t_end);
        result.frames.push_back(std::move(fp));
    }
    result.counters = tracker.counters();
    return result;
}

std::int64_t mem_bits(SensorGeometry sensor, const MsConfig& cfg, std::int64_t bits_per_var) {
    const auto hl = static_cast<std::int64_t>(sensor.pixel_count());
    return 2 * hl * bits_per_var + 5 * static_cast<std::int64_t>(cfg.max_clusters) * bits_per_var;
}

}  // namespace snnrpn::meanshift
