#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "snnrpn/config.hpp"
#include "snnrpn/cost.hpp"
#include "snnrpn/eval.hpp"
#include "snnrpn/io.hpp"
#include "snnrpn/meanshift.hpp"
#include "snnrpn/pipeline.hpp"
#include "snnrpn/synth.hpp"

namespace snnrpn::cli {

namespace fs = std::filesystem;

namespace {

// Options shared by every subcommand that builds a RunConfig. Precedence:
// explicit flags, then --set assignments, then the config file, then
// defaults.
struct ConfigOptions {
    std::string config_path;
    std::vector<std::string> assignments;
    std::optional<double> threshold;
    std::optional<int> window;
    std::optional<int> stride;
    bool lateral = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "Flat key=value configuration file")
            ->check(CLI::ExistingFile);
        app->add_option("--set", assignments, "Override a configuration key (key=value)");
        app->add_option("--threshold", threshold, "Convolution-layer spiking threshold");
        app->add_option("--window", window, "Convolution window size W");
        app->add_option("--stride", stride, "Convolution stride S");
        app->add_flag("--lateral", lateral, "Enable lateral excitation between windows");
    }

    RunConfig build() const {
        RunConfig cfg;
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        }
        for (const auto& a : assignments) {
            apply_assignment(cfg, a);
        }
        if (threshold) {
            cfg.pipeline.conv.v_th = *threshold;
        }
        if (window) {
            cfg.pipeline.window = *window;
        }
        if (stride) {
            cfg.pipeline.stride = *stride;
        }
        if (lateral) {
            cfg.pipeline.lateral = true;
        }
        cfg.pipeline.validate();
        cfg.meanshift.validate();
        return cfg;
    }
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) {
            continue;
        }
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) {
            throw std::invalid_argument("bad number '" + item + "' in list");
        }
        out.push_back(v);
    }
    if (out.empty()) {
        throw std::invalid_argument("empty value list");
    }
    return out;
}

std::string fmt_opt(const std::optional<double>& v) {
    if (!v) {
        return "n/a";
    }
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << *v;
    return os.str();
}

synth::SceneSpec scene_for(const std::string& name, std::uint64_t seed) {
    if (name == "multi-object") {
        return synth::multi_object_scene(seed);
    }
    return synth::preset(name, seed);
}

void print_curve(std::ostream& out, const std::string& title,
                 const std::vector<eval::PrCurvePoint>& curve) {
    out << title << '\n';
    for (const auto& p : curve) {
        out << "  threshold=" << p.threshold << " precision=" << fmt_opt(p.precision)
            << " recall=" << fmt_opt(p.recall) << " tp=" << p.counts.tp << " fp=" << p.counts.fp
            << " fn=" << p.counts.fn;
        if (p.error) {
            out << " error=\"" << *p.error << '"';
        }
        out << '\n';
    }
}

void write_curve(const std::string& path, std::ostream& fallback,
                 const std::vector<eval::PrCurvePoint>& curve, eval::Metric metric,
                 double overlap) {
    if (path.empty()) {
        eval::write_curve_csv(fallback, curve, metric, overlap);
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    eval::write_curve_csv(f, curve, metric, overlap);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spiking region-proposal network for address-event vision streams", "snnrpn"};
    app.require_subcommand(1);

    // synth ------------------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic event stream and ground truth");
    std::string synth_preset = "traffic-50m-day";
    std::uint64_t synth_seed = 1;
    std::string synth_out;
    std::optional<double> synth_duration;
    {
        std::vector<std::string> names;
        for (const auto& p : synth::presets()) {
            names.push_back(p.name);
        }
        names.emplace_back("multi-object");
        synth_cmd->add_option("--preset", synth_preset, "Scene preset")
            ->check(CLI::IsMember(names));
    }
    synth_cmd->add_option("--seed", synth_seed, "Random seed");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--duration", synth_duration, "Override scene duration (seconds)")
        ->check(CLI::NonNegativeNumber);

    // run --------------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "Run the proposal network over an event file");
    ConfigOptions run_cfg;
    run_cfg.attach(run_cmd);
    std::string run_events, run_out, run_cost_out;
    std::int64_t run_bits = 8;
    run_cmd->add_option("--events", run_events, "Event CSV")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--out", run_out, "Proposal CSV to write")->required();
    run_cmd->add_option("--cost-out", run_cost_out, "Cost report CSV to write");
    run_cmd->add_option("--bits", run_bits, "Bits per stored variable for the memory model");

    // sweep ------------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "Precision/recall over convolution thresholds");
    ConfigOptions sweep_cfg;
    sweep_cfg.attach(sweep_cmd);
    std::string sweep_events, sweep_gt, sweep_thresholds, sweep_out;
    std::string sweep_metric = "iou";
    double sweep_overlap = 0.3;
    sweep_cmd->add_option("--events", sweep_events, "Event CSV")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--gt", sweep_gt, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--thresholds", sweep_thresholds, "Comma-separated thresholds")->required();
    sweep_cmd->add_option("--metric", sweep_metric, "iou or fs")->check(CLI::IsMember({"iou", "fs"}));
    sweep_cmd->add_option("--overlap", sweep_overlap, "Overlap ratio for a true positive")
        ->check(CLI::Range(0.0, 1.0));
    sweep_cmd->add_option("--out", sweep_out, "Curve CSV (default: stdout)");

    // eval -------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "Precision and recall of a proposal file");
    std::string eval_props, eval_gt, eval_out;
    std::string eval_metric = "iou";
    double eval_overlap = 0.3;
    eval_cmd->add_option("--proposals", eval_props, "Proposal CSV")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--gt", eval_gt, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--metric", eval_metric, "iou or fs")->check(CLI::IsMember({"iou", "fs"}));
    eval_cmd->add_option("--overlap", eval_overlap, "Overlap ratio for a true positive")
        ->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--out", eval_out, "Result CSV to write");

    // compare ----------------------------------------------------------------
    auto* cmp_cmd = app.add_subcommand("compare", "Proposal network vs mean-shift on the same denoised stream");
    ConfigOptions cmp_cfg;
    cmp_cfg.attach(cmp_cmd);
    std::string cmp_events, cmp_gt, cmp_thresholds, cmp_ms_thresholds, cmp_out;
    std::string cmp_metric = "iou";
    double cmp_overlap = 0.3;
    double cmp_min_precision = 0.8;
    cmp_cmd->add_option("--events", cmp_events, "Event CSV")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--gt", cmp_gt, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
    cmp_cmd->add_option("--thresholds", cmp_thresholds, "Convolution thresholds")->required();
    cmp_cmd->add_option("--ms-thresholds", cmp_ms_thresholds, "Mean-shift activity thresholds")
        ->required();
    cmp_cmd->add_option("--metric", cmp_metric, "iou or fs")->check(CLI::IsMember({"iou", "fs"}));
    cmp_cmd->add_option("--overlap", cmp_overlap, "Overlap ratio for a true positive")
        ->check(CLI::Range(0.0, 1.0));
    cmp_cmd->add_option("--min-precision", cmp_min_precision,
                        "Precision floor for the recall comparison");
    cmp_cmd->add_option("--out", cmp_out, "Directory for rpn.csv and meanshift.csv");

    // cost -------------------------------------------------------------------
    auto* cost_cmd = app.add_subcommand("cost", "Operation and memory model");
    // --h names the sensor height here, so help is long-form only.
    cost_cmd->set_help_flag("--help", "Print this help message and exit");
    std::string cost_alpha = "0.15";
    cost::CostInputs cost_in;
    double cost_fps = 30.0;
    double cost_duration = 60.0;
    std::string cost_csv;
    cost_cmd->add_option("--alpha", cost_alpha, "Fraction of events passing the refractory layer");
    cost_cmd->add_option("--w", cost_in.w, "Window size W");
    cost_cmd->add_option("--h", cost_in.h, "Sensor rows H");
    cost_cmd->add_option("--l", cost_in.l, "Sensor columns L");
    cost_cmd->add_option("--m", cost_in.m, "Convolution rows M");
    cost_cmd->add_option("--n", cost_in.n, "Convolution columns N");
    cost_cmd->add_option("--r", cost_in.r, "Proposals per frame");
    cost_cmd->add_option("--b", cost_in.b, "Bits per stored variable");
    cost_cmd->add_option("--k-inp", cost_in.k_inp, "Total input events (for totals)");
    cost_cmd->add_option("--fps", cost_fps, "Frame rate")->check(CLI::PositiveNumber);
    cost_cmd->add_option("--duration", cost_duration, "Recording duration (seconds)")
        ->check(CLI::NonNegativeNumber);
    cost_cmd->add_option("--csv", cost_csv, "Also write the report as CSV");

    // render -----------------------------------------------------------------
    auto* render_cmd = app.add_subcommand("render", "Write PPM frames with events and proposals");
    ConfigOptions render_cfg;
    render_cfg.attach(render_cmd);
    std::string render_events, render_props, render_gt, render_out;
    std::int64_t render_first = 0;
    std::int64_t render_count = -1;
    render_cmd->add_option("--events", render_events, "Event CSV")->required()->check(CLI::ExistingFile);
    render_cmd->add_option("--proposals", render_props, "Proposal CSV")->check(CLI::ExistingFile);
    render_cmd->add_option("--gt", render_gt, "Ground-truth CSV")->check(CLI::ExistingFile);
    render_cmd->add_option("--out", render_out, "Output directory")->required();
    render_cmd->add_option("--first", render_first, "First frame to render");
    render_cmd->add_option("--count", render_count, "Number of frames (default: all)");

    if (args.empty()) {
        err << app.help();
        return 2;
    }
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return e.get_exit_code() == 0 ? 2 : e.get_exit_code();
    }

    try {
        if (*synth_cmd) {
            auto spec = scene_for(synth_preset, synth_seed);
            if (synth_duration) {
                spec.duration_s = *synth_duration;
            }
            const auto scene = synth::gen_scene(spec);
            fs::create_directories(synth_out);
            io::write_events(fs::path(synth_out) / "events.csv", scene.events);
            io::write_gt(fs::path(synth_out) / "gt.csv", scene.gt);
            out << "preset: " << synth_preset << " seed: " << synth_seed << '\n';
            out << "events: " << scene.events.size() << " (expected "
                << std::llround(synth::expected_event_count(spec)) << ")\n";
            out << "frames: " << scene.frames << " ground-truth boxes: " << scene.gt.size()
                << '\n';
            return 0;
        }

        if (*run_cmd) {
            const auto cfg = run_cfg.build();
            const auto& pc = cfg.pipeline;
            const auto events = io::read_events(run_events, pc.sensor);
            const auto result = run_pipeline(events, pc);
            io::write_proposals(run_out, result.frames);

            const auto m = cost::measure(result.counters);
            const auto in = cost::measured_inputs(result.counters, pc, run_bits);
            const auto rep = cost::report(in);
            const auto exact = cost::ops_total_per_frame(in.k_inp, in.alpha, in.w,
                                                         result.counters.proposals_per_frame);
            std::size_t boxes = 0;
            for (const auto& f : result.frames) {
                boxes += f.boxes.size();
            }
            out << "frames: " << result.frames.size() << " proposals: " << boxes << '\n';
            out << "events: " << result.counters.k_inp << " refractory spikes: "
                << result.counters.k_ref << " convolution spikes: " << result.counters.k_conv
                << '\n';
            out << "measured alpha: "
                << (m.alpha_undefined ? std::string("n/a") : cost::round_sig(m.alpha.to_double()))
                << " mean r: " << cost::round_sig(m.r_mean) << '\n';
            out << "instrumented ops: " << m.ops_total << " (refractory " << m.ops_refractory
                << ", convolution " << m.ops_conv << ", clustering " << m.ops_cluster << ")\n";
            out << "model ops (per-frame exact): " << exact << '\n';
            out << "actual window updates: " << result.counters.conv_window_updates
                << " lateral updates: " << result.counters.lateral_updates << '\n';
            cost::write_report_text(out, rep, in);
            if (!run_cost_out.empty()) {
                std::ofstream f(run_cost_out, std::ios::binary | std::ios::trunc);
                if (!f) {
                    throw std::runtime_error("cannot open '" + run_cost_out + "' for writing");
                }
                cost::write_report_csv(f, rep, in);
                f << "instrumented_ops_total," << m.ops_total << '\n';
                f << "measured_alpha," << in.alpha.to_double() << '\n';
                f << "measured_r_mean," << m.r_mean << '\n';
            }
            return 0;
        }

        if (*sweep_cmd) {
            const auto cfg = sweep_cfg.build();
            const auto events = io::read_events(sweep_events, cfg.pipeline.sensor);
            const auto gt = io::read_gt(fs::path(sweep_gt));
            const auto metric = eval::parse_metric(sweep_metric);
            const auto curve = eval::sweep_thresholds(events, gt, cfg.pipeline,
                                                      parse_list(sweep_thresholds), metric,
                                                      sweep_overlap);
            write_curve(sweep_out, out, curve, metric, sweep_overlap);
            if (!sweep_out.empty()) {
                print_curve(out, "rpn", curve);
            }
            const bool failed = std::any_of(curve.begin(), curve.end(),
                                            [](const auto& p) { return p.error.has_value(); });
            return failed ? 1 : 0;
        }

        if (*eval_cmd) {
            const auto props = io::read_gt(fs::path(eval_props));
            const auto gt = io::read_gt(fs::path(eval_gt));
            const auto metric = eval::parse_metric(eval_metric);
            const auto counts = eval::evaluate_boxes(props, gt, eval_overlap, metric);
            const auto pr = eval::pr_point(counts);
            out << "metric: " << eval::metric_name(metric) << " overlap: " << eval_overlap << '\n';
            out << "tp: " << counts.tp << " fp: " << counts.fp << " fn: " << counts.fn << '\n';
            out << "precision: " << fmt_opt(pr.precision) << '\n';
            out << "recall: " << fmt_opt(pr.recall) << '\n';
            if (!eval_out.empty()) {
                std::ofstream f(eval_out, std::ios::binary | std::ios::trunc);
                if (!f) {
                    throw std::runtime_error("cannot open '" + eval_out + "' for writing");
                }
                f << "precision,recall,tp,fp,fn,metric,overlap\n";
                if (pr.precision) {
                    f << *pr.precision;
                }
                f << ',';
                if (pr.recall) {
                    f << *pr.recall;
                }
                f << ',' << counts.tp << ',' << counts.fp << ',' << counts.fn << ','
                  << eval::metric_name(metric) << ',' << eval_overlap << '\n';
            }
            return 0;
        }

        if (*cmp_cmd) {
            const auto cfg = cmp_cfg.build();
            const auto events = io::read_events(cmp_events, cfg.pipeline.sensor);
            const auto gt = io::read_gt(fs::path(cmp_gt));
            const auto metric = eval::parse_metric(cmp_metric);
            const auto rpn = eval::sweep_thresholds(events, gt, cfg.pipeline,
                                                    parse_list(cmp_thresholds), metric, cmp_overlap);
            const auto ms = eval::sweep_meanshift(events, gt, cfg.pipeline, cfg.meanshift,
                                                  parse_list(cmp_ms_thresholds), metric,
                                                  cmp_overlap);
            print_curve(out, "rpn", rpn);
            print_curve(out, "meanshift", ms);
            const auto best_rpn = eval::best_recall_at_precision(rpn, cmp_min_precision);
            const auto best_ms = eval::best_recall_at_precision(ms, cmp_min_precision);
            out << "best recall at precision >= " << cmp_min_precision << ": rpn "
                << fmt_opt(best_rpn) << ", meanshift " << fmt_opt(best_ms) << '\n';
            if (!cmp_out.empty()) {
                fs::create_directories(cmp_out);
                write_curve((fs::path(cmp_out) / "rpn.csv").string(), out, rpn, metric, cmp_overlap);
                write_curve((fs::path(cmp_out) / "meanshift.csv").string(), out, ms, metric,
                            cmp_overlap);
            }
            return 0;
        }

        if (*cost_cmd) {
            cost_in.alpha = cost::Rational::parse(cost_alpha);
            cost_in.f = static_cast<std::int64_t>(std::llround(cost_fps * cost_duration));
            const auto rep = cost::report(cost_in);
            cost::write_report_text(out, rep, cost_in);
            if (!cost_csv.empty()) {
                std::ofstream f(cost_csv, std::ios::binary | std::ios::trunc);
                if (!f) {
                    throw std::runtime_error("cannot open '" + cost_csv + "' for writing");
                }
                cost::write_report_csv(f, rep, cost_in);
            }
            return 0;
        }

        if (*render_cmd) {
            const auto cfg = render_cfg.build();
            const auto& pc = cfg.pipeline;
            const auto events = io::read_events(render_events, pc.sensor);
            std::map<std::int64_t, std::vector<Box>> props;
            std::map<std::int64_t, std::vector<Box>> gts;
            if (!render_props.empty()) {
                for (const auto& b : io::read_gt(fs::path(render_props))) {
                    props[b.frame_index].push_back(b.box);
                }
            }
            if (!render_gt.empty()) {
                for (const auto& b : io::read_gt(fs::path(render_gt))) {
                    gts[b.frame_index].push_back(b.box);
                }
            }
            const FrameClock clock(pc.fps);
            const std::int64_t total = frame_count(events, pc);
            const std::int64_t last =
                render_count < 0 ? total : std::min(total, render_first + render_count);
            fs::create_directories(render_out);
            std::size_t next = 0;
            std::int64_t written = 0;
            for (std::int64_t k = std::max<std::int64_t>(0, render_first); k < last; ++k) {
                const auto t0 = clock.frame_start(k);
                const auto t1 = clock.frame_end(k);
                while (next < events.size() && events[next].t < t0) {
                    ++next;
                }
                std::size_t end = next;
                while (end < events.size() && events[end].t < t1) {
                    ++end;
                }
                const std::span<const DvsEvent> window(events.data() + next, end - next);
                const auto img = io::render_frame(window, props[k], pc.sensor, gts[k]);
                char name[32];
                std::snprintf(name, sizeof(name), "frame_%06lld.ppm", static_cast<long long>(k));
                io::write_file(fs::path(render_out) / name, img.to_ppm());
                ++written;
                next = end;
            }
            out << "wrote " << written << " frames to " << render_out << '\n';
            return 0;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace snnrpn::cli
