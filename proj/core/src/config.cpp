#include "snnrpn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace snnrpn {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
    return out;
}

long long to_int(const std::string& key, const std::string& v, long long lo, long long hi) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
    if (out < lo || out > hi) {
        throw ConfigError("key '" + key + "': value " + v + " out of range");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "on" || v == "1" || v == "yes") {
        return true;
    }
    if (v == "false" || v == "off" || v == "0" || v == "no") {
        return false;
    }
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

struct Entry {
    const char* key;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

// Shortest text that parses back to the same value.
template <typename T>
std::string str(T v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

#define SNNRPN_DOUBLE(name, field)                                                               \
    Entry {                                                                                      \
        name, [](RunConfig& c, const std::string& k, const std::string& v) {                    \
            c.field = to_double(k, v);                                                           \
        },                                                                                       \
            [](const RunConfig& c) { return str(c.field); }                                     \
    }

#define SNNRPN_INT(name, field, lo, hi)                                                          \
    Entry {                                                                                      \
        name, [](RunConfig& c, const std::string& k, const std::string& v) {                    \
            c.field = static_cast<decltype(c.field)>(to_int(k, v, lo, hi));                      \
        },                                                                                       \
            [](const RunConfig& c) { return str(c.field); }                                     \
    }

constexpr long long kIntMax = std::numeric_limits<int>::max();

const std::vector<Entry>& table() {
    static const std::vector<Entry> kTable = {
        SNNRPN_INT("sensor_height", pipeline.sensor.height, 1, kIntMax),
        SNNRPN_INT("sensor_width", pipeline.sensor.width, 1, kIntMax),
        SNNRPN_INT("window", pipeline.window, 1, kIntMax),
        SNNRPN_INT("stride", pipeline.stride, 1, kIntMax),
        SNNRPN_INT("fps", pipeline.fps, 1, std::numeric_limits<std::uint32_t>::max()),
        SNNRPN_DOUBLE("duration_s", pipeline.duration_s),

        SNNRPN_DOUBLE("ref_tau_m_us", pipeline.refractory.tau_m_us),
        SNNRPN_DOUBLE("ref_r_mem", pipeline.refractory.r_mem),
        SNNRPN_DOUBLE("ref_v_rest", pipeline.refractory.v_rest),
        SNNRPN_DOUBLE("ref_v_th", pipeline.refractory.v_th),
        SNNRPN_DOUBLE("ref_v_reset", pipeline.refractory.v_reset),
        SNNRPN_INT("ref_t_refractory_us", pipeline.refractory.t_refractory_us, 0,
                   std::numeric_limits<long long>::max()),
        SNNRPN_DOUBLE("ref_w_in", pipeline.w_in),

        SNNRPN_DOUBLE("conv_tau_m_us", pipeline.conv.tau_m_us),
        SNNRPN_DOUBLE("conv_r_mem", pipeline.conv.r_mem),
        SNNRPN_DOUBLE("conv_v_rest", pipeline.conv.v_rest),
        SNNRPN_DOUBLE("conv_v_th", pipeline.conv.v_th),
        SNNRPN_DOUBLE("conv_v_reset", pipeline.conv.v_reset),
        SNNRPN_DOUBLE("conv_tau_g_us", pipeline.tau_g_us),
        SNNRPN_DOUBLE("conv_w_ff", pipeline.w_ff),

        Entry{"lateral",
              [](RunConfig& c, const std::string& k, const std::string& v) {
                  c.pipeline.lateral = to_bool(k, v);
              },
              [](const RunConfig& c) { return std::string(c.pipeline.lateral ? "true" : "false"); }},
        SNNRPN_DOUBLE("lateral_weight", pipeline.w_lat),

        SNNRPN_DOUBLE("ms_radius", meanshift.radius),
        SNNRPN_DOUBLE("ms_eta", meanshift.eta),
        SNNRPN_DOUBLE("ms_tau_act_us", meanshift.tau_act_us),
        SNNRPN_DOUBLE("ms_act_threshold", meanshift.act_threshold),
        SNNRPN_INT("ms_max_clusters", meanshift.max_clusters, 1, kIntMax),
    };
    return kTable;
}

#undef SNNRPN_DOUBLE
#undef SNNRPN_INT

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& e : table()) {
        if (key == e.key) {
            e.set(cfg, key, value);
            return;
        }
    }
    throw ConfigError("unknown configuration key '" + key + "'");
}

void apply_assignment(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("expected key=value, got '" + assignment + "'");
    }
    apply_setting(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

RunConfig parse_config(std::istream& in, RunConfig base) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        try {
            apply_assignment(base, line);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream f(path);
    if (!f) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    try {
        return parse_config(f, std::move(base));
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_config(std::ostream& out, const RunConfig& cfg) {
    for (const auto& e : table()) {
        out << e.key << " = " << e.get(cfg) << '\n';
    }
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& e : table()) {
        keys.emplace_back(e.key);
    }
    return keys;
}

}  // namespace snnrpn
