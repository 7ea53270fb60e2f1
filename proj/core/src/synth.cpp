#include "snnrpn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <tuple>

namespace snnrpn::synth {

namespace {

struct EdgePoint {
    int u = 0;  // offset from the object's top-left corner
    int v = 0;
    int polarity = -1;  // 1 = ON, 0 = OFF, -1 = random per event
};

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(purpose)};
    return std::mt19937_64(seq);
}

double wrap(double a, double lo, double hi) {
    const double period = hi - lo;
    double r = std::fmod(a - lo, period);
    if (r < 0) {
        r += period;
    }
    return lo + r;
}

std::vector<EdgePoint> edge_points(const ObjectSpec& obj, std::uint64_t seed, std::size_t index) {
    std::vector<EdgePoint> pts;
    if (obj.vx != 0.0) {
        const int lead = obj.vx > 0 ? 1 : 0;
        for (int v = 0; v < obj.h; ++v) {
            pts.push_back({0, v, 1 - lead});
            if (obj.w > 1) {
                pts.push_back({obj.w - 1, v, lead});
            }
        }
    }
    if (obj.vy != 0.0) {
        const int lead = obj.vy > 0 ? 1 : 0;
        for (int u = 0; u < obj.w; ++u) {
            pts.push_back({u, 0, 1 - lead});
            if (obj.h > 1) {
                pts.push_back({u, obj.h - 1, lead});
            }
        }
    }
    if (pts.empty() || obj.texture_density <= 0.0) {
        return pts;
    }
    auto rng = make_rng(seed, index, 1);
    std::bernoulli_distribution pick(std::min(1.0, obj.texture_density));
    for (int v = 1; v < obj.h - 1; ++v) {
        for (int u = 1; u < obj.w - 1; ++u) {
            if (pick(rng)) {
                pts.push_back({u, v, -1});
            }
        }
    }
    return pts;
}

struct Position {
    int x = 0;  // floor of the top-left corner
    int y = 0;
};

Position position_at(const ObjectSpec& obj, const SensorGeometry& sensor, double t_s) {
    double px = obj.x0 + obj.vx * t_s;
    double py = obj.y0 + obj.vy * t_s;
    if (obj.vx != 0.0) {
        px = wrap(px, -obj.w, sensor.width);
    }
    if (obj.vy != 0.0) {
        py = wrap(py, -obj.h, sensor.height);
    }
    return {static_cast<int>(std::floor(px)), static_cast<int>(std::floor(py))};
}

Box clip(const Box& b, const SensorGeometry& s) {
    return Box{std::max(0, b.x0), std::max(0, b.y0), std::min(s.width, b.x1),
               std::min(s.height, b.y1)};
}

Timestamp to_us(double t_s) { return static_cast<Timestamp>(std::floor(t_s * 1e6)); }

void poisson_times(std::mt19937_64& rng, double rate, double duration_s,
                   const std::function<void(double)>& emit) {
    if (rate <= 0.0) {
        return;
    }
    std::exponential_distribution<double> gap(rate);
    for (double t = gap(rng); t < duration_s; t += gap(rng)) {
        emit(t);
    }
}

}  // namespace

void SceneSpec::validate() const {
    sensor.validate();
    if (!(duration_s >= 0.0) || !std::isfinite(duration_s)) {
        throw ConfigError("scene duration must be finite and non-negative");
    }
    if (fps == 0) {
        throw ConfigError("scene fps must be positive");
    }
    if (noise_rate_hz < 0.0) {
        throw ConfigError("noise rate must be non-negative");
    }
    for (const auto& o : objects) {
        if (o.w <= 0 || o.h <= 0) {
            throw ConfigError("object '" + o.label + "' must have positive size");
        }
        if (o.edge_rate_hz < 0.0 || o.texture_density < 0.0 || o.texture_density > 1.0 ||
            !(o.burst_mean >= 1.0) || !(o.burst_span_us >= 0.0)) {
            throw ConfigError("object '" + o.label + "' has an invalid rate or texture density");
        }
        if (!std::isfinite(o.vx) || !std::isfinite(o.vy)) {
            throw ConfigError("object '" + o.label + "' has a non-finite velocity");
        }
    }
}

Box object_extent(const ObjectSpec& obj, const SensorGeometry& sensor, double t_s) {
    const auto p = position_at(obj, sensor, t_s);
    return Box{p.x, p.y, p.x + obj.w, p.y + obj.h};
}

SynthOutput gen_scene(const SceneSpec& spec) {
    spec.validate();
    SynthOutput out;
    const auto& sensor = spec.sensor;
    const double T = spec.duration_s;

    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        const auto& obj = spec.objects[i];
        const auto pts = edge_points(obj, spec.seed, i);
        if (pts.empty()) {
            continue;
        }
        auto rng = make_rng(spec.seed, i, 2);
        std::uniform_int_distribution<std::size_t> which(0, pts.size() - 1);
        std::bernoulli_distribution coin(0.5);
        std::poisson_distribution<int> extra(obj.burst_mean - 1.0);
        std::uniform_real_distribution<double> jitter(0.0, obj.burst_span_us * 1e-6);
        const double arrivals = obj.edge_rate_hz / obj.burst_mean;
        poisson_times(rng, arrivals * static_cast<double>(pts.size()), T, [&](double t) {
            const auto& p = pts[which(rng)];
            const bool on = p.polarity < 0 ? coin(rng) : p.polarity == 1;
            const auto pos = position_at(obj, sensor, t);
            const int x = pos.x + p.u;
            const int y = pos.y + p.v;
            const int n = obj.burst_mean > 1.0 ? 1 + extra(rng) : 1;
            for (int e = 0; e < n; ++e) {
                const double te = e == 0 ? t : t + jitter(rng);
                if (te < T && sensor.contains(x, y)) {
                    out.events.push_back({to_us(te), x, y, on ? Polarity::On : Polarity::Off});
                }
            }
        });
    }

    {
        auto rng = make_rng(spec.seed, spec.objects.size(), 3);
        std::uniform_int_distribution<int> col(0, sensor.width - 1);
        std::uniform_int_distribution<int> row(0, sensor.height - 1);
        std::bernoulli_distribution coin(0.5);
        poisson_times(rng, spec.noise_rate_hz * static_cast<double>(sensor.pixel_count()), T,
                      [&](double t) {
                          const int x = col(rng);
                          const int y = row(rng);
                          out.events.push_back(
                              {to_us(t), x, y, coin(rng) ? Polarity::On : Polarity::Off});
                      });
    }

    std::sort(out.events.begin(), out.events.end(), [](const DvsEvent& a, const DvsEvent& b) {
        return std::tie(a.t, a.y, a.x, a.polarity) < std::tie(b.t, b.y, b.x, b.polarity);
    });

    // Frame k spans [k, k+1) / fps seconds.
    out.frames = static_cast<std::int64_t>(std::ceil(T * spec.fps - 1e-9));
    for (std::int64_t k = 0; k < out.frames; ++k) {
        const double mid = (static_cast<double>(k) + 0.5) / spec.fps;
        for (std::size_t i = 0; i < spec.objects.size(); ++i) {
            const auto& obj = spec.objects[i];
            const Box full = object_extent(obj, sensor, mid);
            const Box vis = clip(full, sensor);
            if (vis.empty() || 2 * vis.area() < full.area()) {
                continue;
            }
            out.gt.push_back({k, vis, static_cast<std::int64_t>(i)});
        }
    }
    return out;
}

double expected_event_count(const SceneSpec& spec) {
    spec.validate();
    const auto& sensor = spec.sensor;
    double total = spec.noise_rate_hz * static_cast<double>(sensor.pixel_count()) * spec.duration_s;
    if (spec.duration_s <= 0.0) {
        return 0.0;
    }
    constexpr int kSamples = 4000;
    const double dt = spec.duration_s / kSamples;
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        const auto& obj = spec.objects[i];
        const auto pts = edge_points(obj, spec.seed, i);
        if (pts.empty()) {
            continue;
        }
        double visible_time = 0.0;  // integral of on-sensor edge points over time
        for (int s = 0; s < kSamples; ++s) {
            const auto pos = position_at(obj, sensor, (s + 0.5) * dt);
            std::size_t on = 0;
            for (const auto& p : pts) {
                on += sensor.contains(pos.x + p.u, pos.y + p.v) ? 1 : 0;
            }
            visible_time += static_cast<double>(on) * dt;
        }
        total += obj.edge_rate_hz * visible_time;
    }
    return total;
}

// ---------------------------------------------------------------------------
// Presets mimicking the six traffic recordings (distance, lighting).

const std::vector<PresetInfo>& presets() {
    static const std::vector<PresetInfo> kPresets = {
        {"traffic-50m-day", 58.9898, 927242, 40, 20, false},
        {"traffic-50m-night", 59.9599, 771646, 38, 18, true},
        {"traffic-100m-day", 60.0291, 630885, 28, 14, false},
        {"traffic-100m-night", 59.9599, 480272, 27, 14, true},
        {"traffic-150m-day", 58.9897, 583646, 19, 11, false},
        {"traffic-150m-night", 59.9593, 479242, 19, 11, true},
    };
    return kPresets;
}

namespace {

SceneSpec traffic_scene(const PresetInfo& info, std::uint64_t seed) {
    SceneSpec spec;
    spec.duration_s = info.duration_s;
    spec.seed = seed;
    spec.noise_rate_hz = info.night ? 0.03 : 0.01;
    const double texture = info.night ? 0.10 : 0.15;
    constexpr double kBurst = 6.0;

    const double s = info.car_w / 40.0;  // apparent scale relative to the 50 m view
    const int H = spec.sensor.height;
    const int W = spec.sensor.width;
    const int human_w = std::max(3, static_cast<int>(std::lround(0.2 * info.car_w)));
    const int human_h = std::max(6, static_cast<int>(std::lround(0.8 * info.car_h)));
    const int bus_w = static_cast<int>(std::lround(2.2 * info.car_w));
    const int bus_h = static_cast<int>(std::lround(1.6 * info.car_h));

    spec.objects = {
        {"car", info.car_w, info.car_h, 0.10 * W, 0.55 * H, 45.0 * s, 0.0, 0.0, texture},
        {"car", info.car_w, info.car_h, 0.70 * W, 0.75 * H, -30.0 * s, 0.0, 0.0, texture},
        {"bus", bus_w, bus_h, 0.40 * W, 0.22 * H, 20.0 * s, 0.0, 0.0, texture},
        {"human", human_w, human_h, 0.05 * W, 0.05 * H, 8.0 * s, 0.0, 0.0, texture},
        {"human", human_w, human_h, 0.85 * W, 0.30 * H, 0.0, 6.0 * s, 0.0, texture},
    };

    // One edge rate for all objects, chosen so the expected event count
    // matches the recording.
    for (auto& o : spec.objects) {
        o.edge_rate_hz = 1.0;
        o.burst_mean = kBurst;
    }
    const double noise = spec.noise_rate_hz * static_cast<double>(spec.sensor.pixel_count()) *
                         spec.duration_s;
    const double per_unit_rate = expected_event_count(spec) - noise;
    const double rate = (static_cast<double>(info.events) - noise) / per_unit_rate;
    for (auto& o : spec.objects) {
        o.edge_rate_hz = rate;
    }
    return spec;
}

}  // namespace

SceneSpec preset(std::string_view name, std::uint64_t seed) {
    for (const auto& p : presets()) {
        if (p.name == name) {
            return traffic_scene(p, seed);
        }
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

SceneSpec multi_object_scene(std::uint64_t seed, double duration_s) {
    SceneSpec spec;
    spec.duration_s = duration_s;
    spec.seed = seed;
    spec.noise_rate_hz = 0.01;
    const int H = spec.sensor.height;
    const int W = spec.sensor.width;
    spec.objects = {
        {"car", 40, 20, 0.00 * W, 0.10 * H, 40.0, 0.0, 150.0, 0.15, 6.0},
        {"car", 32, 16, 0.60 * W, 0.40 * H, -30.0, 0.0, 150.0, 0.15, 6.0},
        {"van", 48, 24, 0.30 * W, 0.70 * H, 25.0, 0.0, 150.0, 0.15, 6.0},
        {"human", 8, 16, 0.80 * W, 0.05 * H, -10.0, 0.0, 150.0, 0.15, 6.0},
    };
    return spec;
}

}  // namespace snnrpn::synth
