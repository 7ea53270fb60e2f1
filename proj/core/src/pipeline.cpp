#include "snnrpn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "disjoint_set.hpp"
#include "snnrpn/cost.hpp"

namespace snnrpn {

void PipelineConfig::validate() const {
    sensor.validate();
    if (fps == 0) {
        throw ConfigError("fps must be positive");
    }
    if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
        throw ConfigError("duration must be a finite non-negative number of seconds");
    }
    refractory.validate();
    conv.validate();
    if (conv.t_refractory_us != 0) {
        throw ConfigError("convolution neurons have no refractory period");
    }
    if (!(tau_g_us > 0.0)) {
        throw ConfigError("tau_g must be positive");
    }
    if (w_in < 0.0 || w_ff < 0.0 || w_lat < 0.0) {
        throw ConfigError("synaptic weights must be non-negative");
    }
    (void)conv_geometry();
}

FrameClock::FrameClock(std::uint32_t fps) : fps_(fps) {
    if (fps == 0) {
        throw ConfigError("fps must be positive");
    }
}

std::int64_t FrameClock::frame_of(Timestamp t) const {
    return static_cast<std::int64_t>(t * fps_ / 1'000'000ULL);
}

Timestamp FrameClock::frame_start(std::int64_t k) const {
    const auto kk = static_cast<Timestamp>(k);
    return (kk * 1'000'000ULL + fps_ - 1) / fps_;
}

std::int64_t FrameClock::frames_for(double duration_s) const {
    return static_cast<std::int64_t>(std::ceil(duration_s * fps_ - 1e-9));
}

// ---------------------------------------------------------------------------

RefractoryLayer::RefractoryLayer(SensorGeometry sensor, snn::NeuronParams params, double w_in)
    : sensor_(sensor),
      params_(params),
      w_in_(w_in),
      states_(sensor.pixel_count(), snn::NeuronState::rested(params)) {}

std::optional<PixelSpike> RefractoryLayer::step(const DvsEvent& ev) {
    if (!sensor_.contains(ev.x, ev.y)) {
        throw std::out_of_range("event outside sensor");
    }
    auto& st = states_[static_cast<std::size_t>(ev.y) * sensor_.width + ev.x];
    const auto res = snn::apply_drive(st, params_, params_.r_mem * w_in_, ev.t);
    st = res.state;
    if (res.spiked) {
        return PixelSpike{ev.t, ev.x, ev.y};
    }
    return std::nullopt;
}

const snn::NeuronState& RefractoryLayer::neuron(int x, int y) const {
    if (!sensor_.contains(x, y)) {
        throw std::out_of_range("pixel outside sensor");
    }
    return states_[static_cast<std::size_t>(y) * sensor_.width + x];
}

// ---------------------------------------------------------------------------

ConvLayer::ConvLayer(ConvGeometry geometry, snn::NeuronParams params, double tau_g_us,
                     double w_ff, bool lateral, double w_lat)
    : geometry_(std::move(geometry)),
      params_(params),
      w_ff_(w_ff),
      lateral_(lateral),
      w_lat_(w_lat) {
    const auto n = static_cast<std::size_t>(geometry_.rows()) *
                   static_cast<std::size_t>(geometry_.cols());
    states_.assign(n, snn::NeuronState::rested(params_));
    conductances_.assign(n, snn::ConductanceAccumulator{0.0, 0, tau_g_us});
}

ConvLayer::ConvLayer(const PipelineConfig& cfg)
    : ConvLayer(cfg.conv_geometry(), cfg.conv, cfg.tau_g_us, cfg.w_ff, cfg.lateral, cfg.w_lat) {}

int ConvLayer::step(const PixelSpike& spike, std::vector<ProposalBox>& out) {
    WindowIndex targets[4];
    const int n = geometry_.map_pixel_to_windows(spike.x, spike.y, targets);
    for (int k = 0; k < n; ++k) {
        const std::size_t idx = flat(targets[k]);
        auto& g = conductances_[idx];
        g = snn::advance_conductance(g, spike.t);
        g = snn::add_conductance(g, w_ff_, spike.t);
        const auto res = snn::apply_drive(states_[idx], params_, params_.r_mem * g.g_sum, spike.t);
        states_[idx] = res.state;
        if (res.spiked) {
            out.push_back(ProposalBox{geometry_.window_box(targets[k]), spike.t});
            apply_lateral(targets[k], spike.t);
        }
    }
    return n;
}

std::vector<ProposalBox> ConvLayer::step(const PixelSpike& spike) {
    std::vector<ProposalBox> out;
    step(spike, out);
    return out;
}

int ConvLayer::apply_lateral(WindowIndex fired, Timestamp t) {
    if (!lateral_) {
        return 0;
    }
    static constexpr int kDr[4] = {-1, 1, 0, 0};
    static constexpr int kDc[4] = {0, 0, -1, 1};
    int touched = 0;
    for (int d = 0; d < 4; ++d) {
        const WindowIndex nb{fired.row + kDr[d], fired.col + kDc[d]};
        if (nb.row < 0 || nb.col < 0 || nb.row >= geometry_.rows() || nb.col >= geometry_.cols()) {
            continue;
        }
        auto& g = conductances_[flat(nb)];
        g = snn::add_conductance(snn::advance_conductance(g, t), w_lat_, t);
        ++touched;
    }
    lateral_updates_ += static_cast<std::uint64_t>(touched);
    return touched;
}

// ---------------------------------------------------------------------------

bool boxes_touch(const Box& a, const Box& b) {
    return a.x0 <= b.x1 && b.x0 <= a.x1 && a.y0 <= b.y1 && b.y0 <= a.y1;
}

namespace {

// One pass of connected components under boxes_touch.
std::vector<ProposalBox> merge_components(const std::vector<ProposalBox>& in,
                                          std::uint64_t* pair_tests) {
    detail::DisjointSet ds(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        for (std::size_t j = i + 1; j < in.size(); ++j) {
            if (pair_tests) {
                ++*pair_tests;
            }
            if (boxes_touch(in[i].box, in[j].box)) {
                ds.unite(i, j);
            }
        }
    }
    std::vector<std::size_t> slot(in.size(), in.size());
    std::vector<ProposalBox> out;
    for (std::size_t i = 0; i < in.size(); ++i) {
        const std::size_t root = ds.find(i);
        if (slot[root] == in.size()) {
            slot[root] = out.size();
            out.push_back(in[i]);
        } else {
            auto& m = out[slot[root]];
            m.box = bounding_box(m.box, in[i].box);
            m.t = std::max(m.t, in[i].t);
        }
    }
    return out;
}

std::vector<ProposalBox> cluster_impl(std::span<const ProposalBox> boxes,
                                      std::uint64_t* pair_tests) {
    std::vector<ProposalBox> cur(boxes.begin(), boxes.end());
    // Bounding boxes can grow into each other, so iterate to a fixpoint.
    while (true) {
        auto next = merge_components(cur, pair_tests);
        const bool stable = next.size() == cur.size();
        cur = std::move(next);
        if (stable) {
            break;
        }
    }
    std::sort(cur.begin(), cur.end(), [](const ProposalBox& a, const ProposalBox& b) {
        return std::tie(a.box.y0, a.box.x0, a.box.y1, a.box.x1, a.t) <
               std::tie(b.box.y0, b.box.x0, b.box.y1, b.box.x1, b.t);
    });
    return cur;
}

void check_event(const DvsEvent& ev, std::size_t index, Timestamp prev_t,
                 const SensorGeometry& sensor) {
    if (index > 0 && ev.t < prev_t) {
        throw StreamError(index, "event " + std::to_string(index) + " has timestamp " +
                                     std::to_string(ev.t) + " earlier than the previous event (" +
                                     std::to_string(prev_t) + ")");
    }
    if (!sensor.contains(ev.x, ev.y)) {
        throw StreamError(index, "event " + std::to_string(index) + " at (" +
                                     std::to_string(ev.x) + "," + std::to_string(ev.y) +
                                     ") is outside the sensor");
    }
}

}  // namespace

std::vector<ProposalBox> cluster_frame(std::span<const ProposalBox> boxes) {
    return cluster_impl(boxes, nullptr);
}

std::int64_t frame_count(std::span<const DvsEvent> stream, const PipelineConfig& cfg) {
    const FrameClock clock(cfg.fps);
    std::int64_t frames = clock.frames_for(cfg.duration_s);
    if (!stream.empty()) {
        frames = std::max(frames, clock.frame_of(stream.back().t) + 1);
    }
    return frames;
}

std::vector<PixelSpike> denoise(std::span<const DvsEvent> stream, const PipelineConfig& cfg,
                                RunCounters* counters) {
    cfg.validate();
    RefractoryLayer refractory(cfg.sensor, cfg.refractory, cfg.w_in);
    std::vector<PixelSpike> out;
    Timestamp prev_t = 0;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto& ev = stream[i];
        check_event(ev, i, prev_t, cfg.sensor);
        prev_t = ev.t;
        if (auto s = refractory.step(ev)) {
            out.push_back(*s);
        }
    }
    if (counters) {
        counters->k_inp += stream.size();
        counters->k_ref += out.size();
        counters->ops_refractory += cost::kRefractoryOpsPerEvent * stream.size();
    }
    return out;
}

RunResult run_pipeline(std::span<const DvsEvent> stream, const PipelineConfig& cfg) {
    cfg.validate();
    const FrameClock clock(cfg.fps);
    const std::int64_t n_frames = frame_count(stream, cfg);
    const auto conv_spike_ops =
        cost::conv_ops_per_refractory_spike(static_cast<std::uint64_t>(cfg.window));

    RefractoryLayer refractory(cfg.sensor, cfg.refractory, cfg.w_in);
    ConvLayer conv(cfg);

    RunResult result;
    auto& c = result.counters;
    result.raw_boxes.resize(static_cast<std::size_t>(n_frames));

    std::vector<ProposalBox> fired;
    Timestamp prev_t = 0;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto& ev = stream[i];
        check_event(ev, i, prev_t, cfg.sensor);
        prev_t = ev.t;

        ++c.k_inp;
        c.ops_refractory += cost::kRefractoryOpsPerEvent;
        const auto spike = refractory.step(ev);
        if (!spike) {
            continue;
        }
        ++c.k_ref;
        c.ops_conv += conv_spike_ops;
        fired.clear();
        c.conv_window_updates += static_cast<std::uint64_t>(conv.step(*spike, fired));
        c.k_conv += fired.size();
        for (const auto& b : fired) {
            result.raw_boxes[static_cast<std::size_t>(clock.frame_of(b.t))].push_back(b);
        }
    }

    c.lateral_updates = conv.lateral_updates();

    result.frames.reserve(static_cast<std::size_t>(n_frames));
    c.proposals_per_frame.reserve(static_cast<std::size_t>(n_frames));
    for (std::int64_t k = 0; k < n_frames; ++k) {
        const auto& raw = result.raw_boxes[static_cast<std::size_t>(k)];
        const auto r = static_cast<std::uint64_t>(raw.size());
        c.proposals_per_frame.push_back(r);
        c.ops_cluster += cost::cluster_ops(r);
        FrameProposals fp;
        fp.frame_index = k;
        fp.t_start = clock.frame_start(k);
        fp.t_end = clock.frame_end(k);
        fp.boxes = cluster_impl(raw, &c.cluster_pair_tests);
        result.frames.push_back(std::move(fp));
    }
    return result;
}

}  // namespace snnrpn
