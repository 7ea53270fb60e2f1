#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snnrpn/meanshift.hpp"
#include "snnrpn/pipeline.hpp"
#include "snnrpn/types.hpp"

namespace snnrpn::eval {

enum class Metric { IoU, Fitness };

const char* metric_name(Metric m);
// Accepts "iou" or "fs". Throws std::invalid_argument otherwise.
Metric parse_metric(const std::string& name);

// Both throw std::invalid_argument on zero-area input.
double iou(const Box& a, const Box& b);
double fitness(const Box& proposal, const Box& gt);
double score(Metric m, const Box& proposal, const Box& gt);

struct MatchCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    MatchCounts& operator+=(const MatchCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct MatchPair {
    std::size_t proposal = 0;
    std::size_t gt = 0;
    double score = 0.0;

    friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

// Greedy one-to-one assignment: candidate pairs with score >= threshold are
// taken in descending score, ties by (proposal index, gt index).
std::vector<MatchPair> greedy_match(std::span<const Box> proposals, std::span<const Box> gts,
                                    double threshold, Metric metric);

// The same assignment over a precomputed row-major score matrix
// (n_proposals x n_gts).
std::vector<MatchPair> greedy_assign(std::span<const double> scores, std::size_t n_proposals,
                                     std::size_t n_gts, double threshold);

MatchCounts match_frame(std::span<const Box> proposals, std::span<const Box> gts,
                        double threshold, Metric metric);

struct PrPoint {
    std::optional<double> precision;  // absent with no proposals
    std::optional<double> recall;     // absent with no ground truth
};

PrPoint pr_point(const MatchCounts& counts);

// Matches frame by frame and accumulates counts. Ground truth for frames
// without proposals counts as missed.
MatchCounts evaluate(std::span<const FrameProposals> frames,
                     std::span<const GroundTruthBox> gt, double threshold, Metric metric);

// Same, with proposals given as frame-indexed boxes (e.g. read from a file).
MatchCounts evaluate_boxes(std::span<const GroundTruthBox> proposals,
                           std::span<const GroundTruthBox> gt, double threshold, Metric metric);

struct PrCurvePoint {
    double threshold = 0.0;  // swept parameter value
    std::optional<double> precision;
    std::optional<double> recall;
    MatchCounts counts;
    std::optional<std::string> error;  // set when this run failed
};

// One full pipeline run per convolution threshold, in parallel; points come
// back in ascending threshold order. A failing run is reported in its point
// and the sweep continues.
std::vector<PrCurvePoint> sweep_thresholds(std::span<const DvsEvent> stream,
                                           std::span<const GroundTruthBox> gt,
                                           const PipelineConfig& cfg,
                                           std::vector<double> thresholds, Metric metric,
                                           double overlap);

// Mean-shift baseline on the refractory layer's output of `cfg`, one run per
// activity threshold. The denoised stream is computed once and shared.
std::vector<PrCurvePoint> sweep_meanshift(std::span<const DvsEvent> stream,
                                          std::span<const GroundTruthBox> gt,
                                          const PipelineConfig& cfg,
                                          const meanshift::MsConfig& ms,
                                          std::vector<double> act_thresholds, Metric metric,
                                          double overlap);

// Generic sweep: `run` maps a parameter value to frames.
std::vector<PrCurvePoint> sweep(
    std::vector<double> values,
    const std::function<std::vector<FrameProposals>(double)>& run,
    std::span<const GroundTruthBox> gt, Metric metric, double overlap);

// Highest recall among points whose precision is at least `min_precision`.
std::optional<double> best_recall_at_precision(std::span<const PrCurvePoint> curve,
                                               double min_precision);

// CSV rows "threshold,precision,recall,metric,overlap"; absent values are empty.
void write_curve_csv(std::ostream& os, std::span<const PrCurvePoint> curve, Metric metric,
                     double overlap, bool header = true);

}  // namespace snnrpn::eval
