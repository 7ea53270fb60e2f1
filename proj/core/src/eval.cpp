#include "snnrpn/eval.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace snnrpn::eval {

const char* metric_name(Metric m) { return m == Metric::IoU ? "iou" : "fs"; }

Metric parse_metric(const std::string& name) {
    if (name == "iou") {
        return Metric::IoU;
    }
    if (name == "fs") {
        return Metric::Fitness;
    }
    throw std::invalid_argument("unknown metric '" + name + "' (expected iou or fs)");
}

namespace {

void require_area(const Box& b, const char* what) {
    if (b.empty()) {
        throw std::invalid_argument(std::string(what) + " box has zero area");
    }
}

}  // namespace

double iou(const Box& a, const Box& b) {
    require_area(a, "first");
    require_area(b, "second");
    const std::int64_t inter = intersection_area(a, b);
    const std::int64_t uni = a.area() + b.area() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double fitness(const Box& proposal, const Box& gt) {
    require_area(proposal, "proposal");
    require_area(gt, "ground-truth");
    return static_cast<double>(intersection_area(proposal, gt)) / static_cast<double>(gt.area());
}

double score(Metric m, const Box& proposal, const Box& gt) {
    return m == Metric::IoU ? iou(proposal, gt) : fitness(proposal, gt);
}

std::vector<MatchPair> greedy_assign(std::span<const double> scores, std::size_t n_proposals,
                                     std::size_t n_gts, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw std::invalid_argument("overlap threshold must lie in (0, 1]");
    }
    if (scores.size() != n_proposals * n_gts) {
        throw std::invalid_argument("score matrix size does not match its dimensions");
    }
    std::vector<MatchPair> cand;
    for (std::size_t p = 0; p < n_proposals; ++p) {
        for (std::size_t g = 0; g < n_gts; ++g) {
            const double s = scores[p * n_gts + g];
            if (s >= threshold) {
                cand.push_back({p, g, s});
            }
        }
    }
    std::sort(cand.begin(), cand.end(), [](const MatchPair& a, const MatchPair& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return std::tie(a.proposal, a.gt) < std::tie(b.proposal, b.gt);
    });
    std::vector<bool> p_used(n_proposals, false);
    std::vector<bool> g_used(n_gts, false);
    std::vector<MatchPair> out;
    for (const auto& c : cand) {
        if (p_used[c.proposal] || g_used[c.gt]) {
            continue;
        }
        p_used[c.proposal] = true;
        g_used[c.gt] = true;
        out.push_back(c);
    }
    return out;
}

std::vector<MatchPair> greedy_match(std::span<const Box> proposals, std::span<const Box> gts,
                                    double threshold, Metric metric) {
    std::vector<double> scores;
    scores.reserve(proposals.size() * gts.size());
    for (const auto& p : proposals) {
        for (const auto& g : gts) {
            scores.push_back(score(metric, p, g));
        }
    }
    return greedy_assign(scores, proposals.size(), gts.size(), threshold);
}

MatchCounts match_frame(std::span<const Box> proposals, std::span<const Box> gts,
                        double threshold, Metric metric) {
    const auto tp = greedy_match(proposals, gts, threshold, metric).size();
    return MatchCounts{tp, proposals.size() - tp, gts.size() - tp};
}

PrPoint pr_point(const MatchCounts& c) {
    PrPoint p;
    if (c.tp + c.fp > 0) {
        p.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    }
    if (c.tp + c.fn > 0) {
        p.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    return p;
}

namespace {

MatchCounts accumulate(const std::map<std::int64_t, std::vector<Box>>& props,
                       const std::map<std::int64_t, std::vector<Box>>& gts, double threshold,
                       Metric metric) {
    MatchCounts total;
    static const std::vector<Box> kNone;
    auto frame_boxes = [](const auto& m, std::int64_t k) -> const std::vector<Box>& {
        const auto it = m.find(k);
        return it == m.end() ? kNone : it->second;
    };
    std::vector<std::int64_t> frames;
    for (const auto& [k, _] : props) {
        frames.push_back(k);
    }
    for (const auto& [k, _] : gts) {
        frames.push_back(k);
    }
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    for (const auto k : frames) {
        total += match_frame(frame_boxes(props, k), frame_boxes(gts, k), threshold, metric);
    }
    return total;
}

std::map<std::int64_t, std::vector<Box>> by_frame(std::span<const GroundTruthBox> boxes) {
    std::map<std::int64_t, std::vector<Box>> m;
    for (const auto& b : boxes) {
        m[b.frame_index].push_back(b.box);
    }
    return m;
}

}  // namespace

MatchCounts evaluate(std::span<const FrameProposals> frames,
                     std::span<const GroundTruthBox> gt, double threshold, Metric metric) {
    std::map<std::int64_t, std::vector<Box>> props;
    for (const auto& f : frames) {
        auto& v = props[f.frame_index];
        for (const auto& b : f.boxes) {
            v.push_back(b.box);
        }
    }
    return accumulate(props, by_frame(gt), threshold, metric);
}

MatchCounts evaluate_boxes(std::span<const GroundTruthBox> proposals,
                           std::span<const GroundTruthBox> gt, double threshold, Metric metric) {
    return accumulate(by_frame(proposals), by_frame(gt), threshold, metric);
}

std::vector<PrCurvePoint> sweep(std::vector<double> values,
                                const std::function<std::vector<FrameProposals>(double)>& run,
                                std::span<const GroundTruthBox> gt, Metric metric,
                                double overlap) {
    if (values.empty()) {
        throw std::invalid_argument("sweep needs at least one threshold");
    }
    std::sort(values.begin(), values.end());
    std::vector<PrCurvePoint> points(values.size());

    auto one = [&](std::size_t i) {
        PrCurvePoint& pt = points[i];
        pt.threshold = values[i];
        try {
            const auto frames = run(values[i]);
            pt.counts = evaluate(frames, gt, overlap, metric);
            const auto pr = pr_point(pt.counts);
            pt.precision = pr.precision;
            pt.recall = pr.recall;
        } catch (const std::exception& e) {
            pt.error = e.what();
        }
    };

    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(std::thread::hardware_concurrency(),
                                                       values.size()));
    if (workers == 1) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            one(i);
        }
        return points;
    }
    // Each worker takes every `workers`-th point; runs share no state.
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t i = w; i < values.size(); i += workers) {
                one(i);
            }
        }));
    }
    for (auto& j : jobs) {
        j.get();
    }
    return points;
}

std::vector<PrCurvePoint> sweep_thresholds(std::span<const DvsEvent> stream,
                                           std::span<const GroundTruthBox> gt,
                                           const PipelineConfig& cfg,
                                           std::vector<double> thresholds, Metric metric,
                                           double overlap) {
    return sweep(
        std::move(thresholds),
        [&](double th) {
            PipelineConfig c = cfg;
            c.conv.v_th = th;
            return run_pipeline(stream, c).frames;
        },
        gt, metric, overlap);
}

std::vector<PrCurvePoint> sweep_meanshift(std::span<const DvsEvent> stream,
                                          std::span<const GroundTruthBox> gt,
                                          const PipelineConfig& cfg,
                                          const meanshift::MsConfig& ms,
                                          std::vector<double> act_thresholds, Metric metric,
                                          double overlap) {
    const auto spikes = denoise(stream, cfg);
    const auto n_frames = frame_count(stream, cfg);
    return sweep(
        std::move(act_thresholds),
        [&](double th) {
            meanshift::MsConfig c = ms;
            c.act_threshold = th;
            return meanshift::run_meanshift(spikes, cfg.sensor, c, cfg.fps, n_frames).frames;
        },
        gt, metric, overlap);
}

std::optional<double> best_recall_at_precision(std::span<const PrCurvePoint> curve,
                                               double min_precision) {
    std::optional<double> best;
    for (const auto& p : curve) {
        if (p.error || !p.precision || !p.recall || *p.precision < min_precision) {
            continue;
        }
        if (!best || *p.recall > *best) {
            best = p.recall;
        }
    }
    return best;
}

void write_curve_csv(std::ostream& os, std::span<const PrCurvePoint> curve, Metric metric,
                     double overlap, bool header) {
    if (header) {
        os << "threshold,precision,recall,metric,overlap\n";
    }
    for (const auto& p : curve) {
        os << p.threshold << ',';
        if (p.precision) {
            os << *p.precision;
        }
        os << ',';
        if (p.recall) {
            os << *p.recall;
        }
        os << ',' << metric_name(metric) << ',' << overlap << '\n';
    }
}

}  // namespace snnrpn::eval
