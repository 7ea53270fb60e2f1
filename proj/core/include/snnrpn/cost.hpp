#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace snnrpn {
struct RunCounters;
struct PipelineConfig;
}

// Operation and memory model of the three-layer network, plus the per-frame
// exact form used to reconcile instrumented counters.
//
//   C = 5 K + alpha K (24 W^2 + 16) + F r (r - 1)
//   B = 2 H L b + 2 H L b + 2 M N b + 2 r b
namespace snnrpn::cost {

inline constexpr std::uint64_t kRefractoryOpsPerEvent = 5;

// Synaptic update (5 per synapse), current summation (W^2 - 1) and membrane
// update (5) for one window neuron.
constexpr std::uint64_t conv_ops_per_window(std::uint64_t w) { return 6 * w * w + 4; }

// Worst case of four windows per refractory spike.
constexpr std::uint64_t conv_ops_per_refractory_spike(std::uint64_t w) {
    return 4 * conv_ops_per_window(w);
}

constexpr std::uint64_t cluster_ops(std::uint64_t r) { return r == 0 ? 0 : r * (r - 1); }

// Exact rational in lowest terms with a positive denominator.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t num, std::int64_t den);
    static Rational integer(std::int64_t v) { return Rational(v, 1); }
    // Parses "0.15", "3/20" or "7". Throws std::invalid_argument.
    static Rational parse(const std::string& text);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    bool is_integer() const { return den_ == 1; }

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);
    friend bool operator==(const Rational&, const Rational&) = default;
    friend bool operator<(const Rational& a, const Rational& b);

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

struct CostInputs {
    std::int64_t k_inp = 0;
    Rational alpha;
    std::int64_t w = 16;
    std::int64_t f = 0;
    std::int64_t r = 0;
    std::int64_t h = 180;
    std::int64_t l = 240;
    std::int64_t m = 15;
    std::int64_t n = 20;
    std::int64_t b = 8;

    // Throws std::invalid_argument on alpha outside [0, 1] or negative counts.
    void validate() const;
};

struct OpsBreakdown {
    Rational refractory;
    Rational conv;
    Rational cluster;

    Rational total() const { return refractory + conv + cluster; }
};

struct MemBreakdown {
    std::int64_t refractory_membrane = 0;  // 2 H L b
    std::int64_t refractory_synapse = 0;   // 2 H L b
    std::int64_t conv_membrane = 0;        // 2 M N b
    std::int64_t cluster_buffer = 0;       // 2 r b

    std::int64_t total() const {
        return refractory_membrane + refractory_synapse + conv_membrane + cluster_buffer;
    }
};

OpsBreakdown ops_breakdown(const CostInputs& in);
Rational ops_total(const CostInputs& in);
MemBreakdown mem_breakdown(const CostInputs& in);
std::int64_t mem_total(const CostInputs& in);

// Per-frame exact form: the clustering term sums r_t (r_t - 1) over the
// actual proposal counts instead of F r (r - 1).
Rational ops_total_per_frame(std::int64_t k_inp, const Rational& alpha, std::int64_t w,
                             std::span<const std::uint64_t> proposals_per_frame);

struct CostReport {
    OpsBreakdown ops;
    MemBreakdown mem;
    Rational c_total;
    std::int64_t b_total = 0;
    // State this implementation actually keeps at b bits per variable: three
    // per pixel neuron, five per window neuron with its conductance, five per
    // buffered box. The formula above counts the pixel layer twice.
    std::int64_t b_state = 0;
    // Per input event, excluding the frame-rate clustering term.
    Rational per_event_streaming;
    // Per input event, including clustering; absent when k_inp = 0.
    std::optional<Rational> per_event;
};

CostReport report(const CostInputs& in);

struct Measurement {
    Rational alpha;
    bool alpha_undefined = false;  // k_inp == 0
    double r_mean = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t ops_refractory = 0;
    std::uint64_t ops_conv = 0;
    std::uint64_t ops_cluster = 0;
    std::uint64_t ops_total = 0;
};

Measurement measure(const RunCounters& counters);

// Model inputs for a finished run: K, alpha, F and the rounded mean r come
// from the counters, geometry and W from the configuration.
CostInputs measured_inputs(const RunCounters& counters, const PipelineConfig& cfg,
                           std::int64_t bits_per_var = 8);

// Fixed notation rounded to `digits` significant digits: 929, 0.929, 1.39.
std::string round_sig(double value, int digits = 3);

void write_report_text(std::ostream& os, const CostReport& rep, const CostInputs& in);
void write_report_csv(std::ostream& os, const CostReport& rep, const CostInputs& in);

}  // namespace snnrpn::cost
