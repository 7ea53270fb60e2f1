// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Oracles live in tests/oracles and share no code with the
// engine beyond its public types.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles/dense_network.hpp"
#include "oracles/exhaustive_match.hpp"
#include "oracles/raster.hpp"
#include "snnrpn/cost.hpp"
#include "snnrpn/eval.hpp"
#include "snnrpn/meanshift.hpp"
#include "snnrpn/pipeline.hpp"
#include "snnrpn/synth.hpp"

using namespace snnrpn;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(prec) << v;
    return os.str();
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string("n/a"); }

Box random_box(std::mt19937_64& rng, int extent, int max_side) {
    std::uniform_int_distribution<int> side(1, max_side);
    const int w = side(rng);
    const int h = side(rng);
    std::uniform_int_distribution<int> px(0, extent - w);
    std::uniform_int_distribution<int> py(0, extent - h);
    const int x = px(rng);
    const int y = py(rng);
    return Box{x, y, x + w, y + h};
}

// ---------------------------------------------------------------------------

Outcome cost_model() {
    const auto t0 = Clock::now();
    std::ostringstream out, err;
    const int rc = cli::run({"cost", "--alpha", "0.15", "--r", "5", "--h", "180", "--l", "240",
                             "--m", "15", "--n", "20", "--w", "16", "--fps", "30", "--b", "8"},
                            out, err);
    const double elapsed = seconds_since(t0);

    cost::CostInputs in;
    in.alpha = cost::Rational::parse("0.15");
    in.r = 5;
    in.f = 30 * 60;
    const auto rep = cost::report(in);
    const bool ops_ok = rep.per_event_streaming == cost::Rational::integer(929);
    const bool mem_ok = rep.b_total == 1'387'280;
    const std::string text = out.str();
    const bool text_ok = text.find("929 (0.929 Kops/event") != std::string::npos &&
                         text.find("1387280 bits (1.39 Mbits)") != std::string::npos;
    Outcome o;
    o.pass = rc == 0 && ops_ok && mem_ok && text_ok && elapsed < 1.0;
    o.detail = "ops/event=" + std::to_string(rep.per_event_streaming.num()) + "/" +
               std::to_string(rep.per_event_streaming.den()) +
               " bits=" + std::to_string(rep.b_total) + " cli_rc=" + std::to_string(rc) +
               " runtime=" + fmt(elapsed, 3) + "s (limit 1 s)";
    return o;
}

Outcome counter_reconciliation() {
    struct Case {
        std::string name;
        synth::SceneSpec scene;
        PipelineConfig cfg;
    };
    std::vector<Case> cases;
    {
        auto s = synth::preset("traffic-100m-day", 3);
        s.duration_s = 10.0;
        cases.push_back({"traffic-100m-day", s, PipelineConfig{}});
    }
    {
        PipelineConfig c;
        c.lateral = true;
        cases.push_back({"multi-object+lateral", synth::multi_object_scene(5, 5.0), c});
    }
    {
        PipelineConfig c;
        c.window = 8;
        c.stride = 6;
        c.conv.v_th = 1.5;
        auto s = synth::preset("traffic-150m-night", 11);
        s.duration_s = 10.0;
        cases.push_back({"traffic-150m-night W8", s, c});
    }

    Outcome o{true, ""};
    for (const auto& cs : cases) {
        const auto scene = synth::gen_scene(cs.scene);
        const auto run = run_pipeline(scene.events, cs.cfg);
        const auto& c = run.counters;
        const auto m = cost::measure(c);
        const auto in = cost::measured_inputs(c, cs.cfg);
        const auto model = cost::ops_total_per_frame(in.k_inp, in.alpha, in.w, c.proposals_per_frame);
        const bool ops_ok = model == cost::Rational::integer(static_cast<std::int64_t>(m.ops_total));
        const auto geometry = cs.cfg.conv_geometry();
        const bool mem_ok = in.h == cs.cfg.sensor.height && in.l == cs.cfg.sensor.width &&
                            in.m == geometry.rows() && in.n == geometry.cols() &&
                            in.w == cs.cfg.window &&
                            in.f == static_cast<std::int64_t>(run.frames.size()) &&
                            in.k_inp == static_cast<std::int64_t>(scene.events.size());
        o.pass = o.pass && ops_ok && mem_ok;
        std::ostringstream d;
        d << cs.name << ": counters=" << m.ops_total << " model=" << model
          << (mem_ok ? " inputs ok" : " inputs MISMATCH") << "; ";
        o.detail += d.str();
    }
    return o;
}

Outcome dynamics_oracle() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2024);
    Outcome o{true, ""};
    int compared = 0;
    std::uint64_t worst_dt = 0;
    for (const bool lateral : {false, true}) {
        PipelineConfig cfg;
        cfg.sensor = SensorGeometry{4, 4};
        cfg.window = 2;
        cfg.stride = 1;
        cfg.conv.v_th = 2.5;
        cfg.refractory.t_refractory_us = 5'000;
        cfg.lateral = lateral;

        std::uniform_int_distribution<int> coord(0, 3);
        std::uniform_int_distribution<std::uint64_t> when(0, 300'000);
        std::vector<DvsEvent> events(1000);
        for (auto& e : events) {
            e = {when(rng), coord(rng), coord(rng), Polarity::On};
        }
        std::sort(events.begin(), events.end(),
                  [](const DvsEvent& a, const DvsEvent& b) { return a.t < b.t; });

        RefractoryLayer ref(cfg.sensor, cfg.refractory, cfg.w_in);
        ConvLayer conv(cfg);
        std::vector<oracle::DenseSpike> ev_ref, ev_conv;
        std::vector<ProposalBox> fired;
        const auto geometry = cfg.conv_geometry();
        for (const auto& e : events) {
            if (auto s = ref.step(e)) {
                ev_ref.push_back({s->t, s->x, s->y});
                fired.clear();
                conv.step(*s, fired);
                for (const auto& b : fired) {
                    // Recover the window index from the box origin.
                    const auto& ro = geometry.row_origins();
                    const auto& co = geometry.col_origins();
                    const int i = static_cast<int>(std::find(ro.begin(), ro.end(), b.box.y0) - ro.begin());
                    const int j = static_cast<int>(std::find(co.begin(), co.end(), b.box.x0) - co.begin());
                    ev_conv.push_back({b.t, i, j});
                }
            }
        }
        const auto dense = oracle::simulate_dense(events, cfg, events.back().t + 1);

        auto compare = [&](const std::vector<oracle::DenseSpike>& a,
                           const std::vector<oracle::DenseSpike>& b) {
            if (a.size() != b.size()) {
                return false;
            }
            for (std::size_t k = 0; k < a.size(); ++k) {
                if (a[k].a != b[k].a || a[k].b != b[k].b) {
                    return false;
                }
                const auto d = a[k].t > b[k].t ? a[k].t - b[k].t : b[k].t - a[k].t;
                worst_dt = std::max(worst_dt, d);
                if (d > 2) {
                    return false;
                }
            }
            return true;
        };
        const bool ok = compare(ev_ref, dense.refractory) && compare(ev_conv, dense.conv);
        compared += static_cast<int>(ev_conv.size());
        o.pass = o.pass && ok;
        o.detail += std::string(lateral ? "lateral" : "feed-forward") + ": refractory " +
                    std::to_string(ev_ref.size()) + "/" + std::to_string(dense.refractory.size()) +
                    " conv " + std::to_string(ev_conv.size()) + "/" +
                    std::to_string(dense.conv.size()) + " spikes; ";
    }
    const double elapsed = seconds_since(t0);
    o.pass = o.pass && compared > 0 && elapsed < 30.0;
    o.detail += "max |dt|=" + std::to_string(worst_dt) + " us (limit 2), runtime=" +
                fmt(elapsed, 2) + "s (limit 30 s)";
    return o;
}

Outcome geometry_metric_oracles() {
    std::mt19937_64 rng(99);
    int metric_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        const Box a = random_box(rng, 40, 20);
        const Box b = random_box(rng, 40, 20);
        if (eval::iou(a, b) != oracle::pixel_iou(a, b) ||
            eval::fitness(a, b) != oracle::pixel_fitness(a, b)) {
            ++metric_bad;
        }
    }

    int cluster_bad = 0;
    std::uniform_int_distribution<int> count(0, 14);
    for (int i = 0; i < 200; ++i) {
        std::vector<ProposalBox> in;
        std::vector<Box> plain;
        const int n = count(rng);
        for (int k = 0; k < n; ++k) {
            Box b = random_box(rng, 64, 12);
            in.push_back({b, static_cast<Timestamp>(k)});
            plain.push_back(b);
            if (k % 5 == 4) {  // duplicates make it a multiset
                in.push_back({b, static_cast<Timestamp>(k)});
                plain.push_back(b);
            }
        }
        const auto got = cluster_frame(in);
        const auto want = oracle::raster_cluster(plain, 64, 64);
        std::vector<Box> got_boxes;
        for (const auto& p : got) {
            got_boxes.push_back(p.box);
        }
        if (got_boxes != want) {
            ++cluster_bad;
        }
    }

    // Every score matrix up to 3x3 over an alphabet that includes ties and a
    // value exactly at the threshold.
    const double threshold = 0.5;
    const double alphabet[4] = {0.2, 0.5, 0.7, 0.9};
    long instances = 0;
    long match_bad = 0;
    for (std::size_t np = 0; np <= 3; ++np) {
        for (std::size_t ng = 0; ng <= 3; ++ng) {
            const std::size_t cells = np * ng;
            long total = 1;
            for (std::size_t c = 0; c < cells; ++c) {
                total *= 4;
            }
            std::vector<double> scores(cells);
            for (long code = 0; code < total; ++code) {
                long rest = code;
                for (std::size_t c = 0; c < cells; ++c) {
                    scores[c] = alphabet[rest % 4];
                    rest /= 4;
                }
                ++instances;
                if (eval::greedy_assign(scores, np, ng, threshold) !=
                    oracle::exhaustive_match(scores, np, ng, threshold)) {
                    ++match_bad;
                }
            }
        }
    }

    Outcome o;
    o.pass = metric_bad == 0 && cluster_bad == 0 && match_bad == 0;
    o.detail = "metric mismatches " + std::to_string(metric_bad) + "/1000, cluster mismatches " +
               std::to_string(cluster_bad) + "/200, matching mismatches " +
               std::to_string(match_bad) + "/" + std::to_string(instances);
    return o;
}

Outcome threshold_trend() {
    const auto t0 = Clock::now();
    const auto scene = synth::gen_scene(synth::preset("traffic-50m-day", 7));
    PipelineConfig cfg;
    const std::vector<double> thresholds{3, 4, 6, 8, 12};
    const auto curve = eval::sweep_thresholds(scene.events, scene.gt, cfg, thresholds,
                                              eval::Metric::IoU, 0.3);
    int inversions = 0;
    double worst = 0.0;
    bool complete = true;
    std::string recalls;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        complete = complete && curve[i].recall.has_value() && !curve[i].error;
        recalls += fmt(curve[i].threshold, 0) + ":" + fmt(curve[i].recall) + " ";
        if (i > 0 && curve[i].recall && curve[i - 1].recall &&
            *curve[i].recall > *curve[i - 1].recall) {
            ++inversions;
            worst = std::max(worst, *curve[i].recall - *curve[i - 1].recall);
        }
    }
    const double elapsed = seconds_since(t0);
    Outcome o;
    o.pass = complete && curve.size() >= 5 && inversions <= 1 && worst <= 0.02 && elapsed < 120.0;
    o.detail = "recall by threshold " + recalls + "inversions=" + std::to_string(inversions) +
               " (max rise " + fmt(worst) + "), runtime=" + fmt(elapsed, 2) + "s (limit 120 s)";
    return o;
}

Outcome window_size_trend() {
    const auto scene = synth::gen_scene(synth::preset("traffic-50m-day", 7));
    // The threshold is held fixed per unit of window area.
    const double theta = PipelineConfig{}.conv.v_th;
    auto recall_for = [&](int w, int s) {
        PipelineConfig cfg;
        cfg.window = w;
        cfg.stride = s;
        cfg.conv.v_th = theta * (w * w) / 256.0;
        const auto run = run_pipeline(scene.events, cfg);
        const auto counts = eval::evaluate(run.frames, scene.gt, 0.5, eval::Metric::IoU);
        return eval::pr_point(counts).recall;
    };
    const auto small = recall_for(8, 6);
    const auto large = recall_for(16, 12);
    Outcome o;
    o.pass = small && large && *small > *large;
    o.detail = "recall at IoU 0.5: W=8/S=6 " + fmt(small) + " vs W=16/S=12 " + fmt(large);
    return o;
}

Outcome baseline_comparison() {
    const auto scene = synth::gen_scene(synth::multi_object_scene(7));
    PipelineConfig cfg;
    const auto rpn = eval::sweep_thresholds(scene.events, scene.gt, cfg,
                                            {4, 8, 12, 16, 24, 32, 48}, eval::Metric::IoU, 0.3);
    const auto ms = eval::sweep_meanshift(scene.events, scene.gt, cfg, meanshift::MsConfig{},
                                          {5, 10, 20, 30, 35, 40, 45, 50, 55, 60, 70},
                                          eval::Metric::IoU, 0.3);
    const auto best_rpn = eval::best_recall_at_precision(rpn, 0.8);
    const auto best_ms = eval::best_recall_at_precision(ms, 0.8);
    Outcome o;
    o.pass = best_rpn && best_ms && *best_rpn > *best_ms;
    o.detail = "best recall with precision >= 0.8 at IoU 0.3: network " + fmt(best_rpn) +
               ", mean-shift " + fmt(best_ms);
    return o;
}

Outcome denoising() {
    PipelineConfig cfg;
    synth::SceneSpec noise;
    noise.duration_s = 2.0;
    noise.noise_rate_hz = 5.0;
    noise.seed = 17;
    const auto scene = synth::gen_scene(noise);
    const auto spikes = denoise(scene.events, cfg);

    const auto t_ref = cfg.refractory.t_refractory_us;
    std::map<std::pair<int, int>, std::vector<Timestamp>> per_pixel;
    for (const auto& s : spikes) {
        per_pixel[{s.x, s.y}].push_back(s.t);
    }
    const auto duration_us = static_cast<Timestamp>(noise.duration_s * 1e6);
    const std::size_t cap = static_cast<std::size_t>(duration_us / t_ref) + 1;
    int rate_bad = 0;
    Timestamp min_gap = duration_us;
    for (const auto& [px, ts] : per_pixel) {
        if (ts.size() > cap) {
            ++rate_bad;
        }
        for (std::size_t k = 1; k < ts.size(); ++k) {
            min_gap = std::min(min_gap, ts[k] - ts[k - 1]);
            if (ts[k] - ts[k - 1] < t_ref) {
                ++rate_bad;
            }
        }
    }

    const auto traffic = synth::gen_scene(synth::preset("traffic-50m-day", 7));
    RunCounters c;
    denoise(traffic.events, cfg, &c);
    const double alpha = static_cast<double>(c.k_ref) / static_cast<double>(c.k_inp);

    Outcome o;
    o.pass = rate_bad == 0 && alpha >= 0.05 && alpha <= 0.4;
    o.detail = "noise: " + std::to_string(scene.events.size()) + " events -> " +
               std::to_string(spikes.size()) + " spikes, min per-pixel gap " +
               std::to_string(min_gap) + " us (t_ref " + std::to_string(t_ref) +
               "), violations " + std::to_string(rate_bad) + "; traffic alpha=" + fmt(alpha) +
               " (band [0.05, 0.4])";
    return o;
}

Outcome fs_dominates_iou() {
    std::mt19937_64 rng(4242);
    int violations = 0;
    for (int i = 0; i < 10'000; ++i) {
        const Box p = random_box(rng, 50, 30);
        const Box g = random_box(rng, 50, 30);
        if (eval::fitness(p, g) < eval::iou(p, g)) {
            ++violations;
        }
    }
    return {violations == 0, "violations " + std::to_string(violations) + "/10000"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1 cost model reproduction", cost_model},
        {"2 counter reconciliation", counter_reconciliation},
        {"3 dynamics vs dense Euler", dynamics_oracle},
        {"4 geometry and metric oracles", geometry_metric_oracles},
        {"5 threshold trend", threshold_trend},
        {"6 window-size trend", window_size_trend},
        {"7 baseline comparison", baseline_comparison},
        {"8 denoising", denoising},
        {"9 fitness >= IoU", fs_dominates_iou},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << name << "] " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
