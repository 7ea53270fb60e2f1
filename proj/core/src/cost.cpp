#include "snnrpn/cost.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "snnrpn/pipeline.hpp"

namespace snnrpn::cost {

Rational::Rational(std::int64_t num, std::int64_t den) {
    if (den == 0) {
        throw std::invalid_argument("zero denominator");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = g == 0 ? 0 : num / g;
    den_ = g == 0 ? 1 : den / g;
}

Rational Rational::parse(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("empty number");
    }
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
    }
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool seen_dot = false;
    bool any_digit = false;
    std::size_t i = 0;
    bool negative = false;
    if (text[0] == '-' || text[0] == '+') {
        negative = text[0] == '-';
        i = 1;
    }
    for (; i < text.size(); ++i) {
        const char ch = text[i];
        if (ch == '.' && !seen_dot) {
            seen_dot = true;
            continue;
        }
        if (ch < '0' || ch > '9') {
            throw std::invalid_argument("not a decimal number: '" + text + "'");
        }
        if (num > (INT64_MAX - 9) / 10 || (seen_dot && den > INT64_MAX / 10)) {
            throw std::invalid_argument("too many digits: '" + text + "'");
        }
        any_digit = true;
        num = num * 10 + (ch - '0');
        if (seen_dot) {
            den *= 10;
        }
    }
    if (!any_digit) {
        throw std::invalid_argument("not a decimal number: '" + text + "'");
    }
    return Rational(negative ? -num : num, den);
}

Rational operator+(const Rational& a, const Rational& b) {
    const std::int64_t l = std::lcm(a.den_, b.den_);
    return Rational(a.num_ * (l / a.den_) + b.num_ * (l / b.den_), l);
}

Rational operator*(const Rational& a, const Rational& b) {
    // Cross-reduce first to keep intermediates small.
    const std::int64_t g1 = std::gcd(a.num_, b.den_);
    const std::int64_t g2 = std::gcd(b.num_, a.den_);
    const std::int64_t an = g1 ? a.num_ / g1 : a.num_;
    const std::int64_t bd = g1 ? b.den_ / g1 : b.den_;
    const std::int64_t bn = g2 ? b.num_ / g2 : b.num_;
    const std::int64_t ad = g2 ? a.den_ / g2 : a.den_;
    return Rational(an * bn, ad * bd);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) {
        throw std::domain_error("division by zero");
    }
    return a * Rational(b.den_, b.num_);
}

bool operator<(const Rational& a, const Rational& b) {
    return (a + Rational(-b.num_, b.den_)).num_ < 0;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) {
    os << r.num();
    if (r.den() != 1) {
        os << '/' << r.den();
    }
    return os;
}

void CostInputs::validate() const {
    if (alpha.num() < 0 || Rational::integer(1) < alpha) {
        throw std::invalid_argument("alpha must lie in [0, 1]");
    }
    if (k_inp < 0 || w < 0 || f < 0 || r < 0 || h < 0 || l < 0 || m < 0 || n < 0 || b < 0) {
        throw std::invalid_argument("cost inputs must be non-negative");
    }
}

OpsBreakdown ops_breakdown(const CostInputs& in) {
    in.validate();
    const auto w = static_cast<std::uint64_t>(in.w);
    OpsBreakdown o;
    o.refractory = Rational::integer(in.k_inp * static_cast<std::int64_t>(kRefractoryOpsPerEvent));
    o.conv = in.alpha * Rational::integer(in.k_inp) *
             Rational::integer(static_cast<std::int64_t>(conv_ops_per_refractory_spike(w)));
    o.cluster = Rational::integer(
        in.f * static_cast<std::int64_t>(cluster_ops(static_cast<std::uint64_t>(in.r))));
    return o;
}

Rational ops_total(const CostInputs& in) { return ops_breakdown(in).total(); }

MemBreakdown mem_breakdown(const CostInputs& in) {
    in.validate();
    MemBreakdown m;
    m.refractory_membrane = 2 * in.h * in.l * in.b;
    m.refractory_synapse = 2 * in.h * in.l * in.b;
    m.conv_membrane = 2 * in.m * in.n * in.b;
    m.cluster_buffer = 2 * in.r * in.b;
    return m;
}

std::int64_t mem_total(const CostInputs& in) { return mem_breakdown(in).total(); }

Rational ops_total_per_frame(std::int64_t k_inp, const Rational& alpha, std::int64_t w,
                             std::span<const std::uint64_t> proposals_per_frame) {
    std::int64_t cluster = 0;
    for (const auto r : proposals_per_frame) {
        cluster += static_cast<std::int64_t>(cluster_ops(r));
    }
    const auto per_spike =
        static_cast<std::int64_t>(conv_ops_per_refractory_spike(static_cast<std::uint64_t>(w)));
    return Rational::integer(k_inp * static_cast<std::int64_t>(kRefractoryOpsPerEvent)) +
           alpha * Rational::integer(k_inp) * Rational::integer(per_spike) +
           Rational::integer(cluster);
}

CostReport report(const CostInputs& in) {
    CostReport rep;
    rep.ops = ops_breakdown(in);
    rep.mem = mem_breakdown(in);
    rep.c_total = rep.ops.total();
    rep.b_total = rep.mem.total();
    rep.b_state = in.b * (3 * in.h * in.l + 5 * in.m * in.n + 5 * in.r);
    rep.per_event_streaming =
        Rational::integer(static_cast<std::int64_t>(kRefractoryOpsPerEvent)) +
        in.alpha * Rational::integer(static_cast<std::int64_t>(
                       conv_ops_per_refractory_spike(static_cast<std::uint64_t>(in.w))));
    if (in.k_inp > 0) {
        rep.per_event = rep.c_total / Rational::integer(in.k_inp);
    }
    return rep;
}

Measurement measure(const RunCounters& c) {
    Measurement m;
    if (c.k_inp == 0) {
        m.alpha_undefined = true;
    } else {
        m.alpha = Rational(static_cast<std::int64_t>(c.k_ref), static_cast<std::int64_t>(c.k_inp));
    }
    m.frames = c.proposals_per_frame.size();
    if (!c.proposals_per_frame.empty()) {
        const auto sum = std::accumulate(c.proposals_per_frame.begin(),
                                         c.proposals_per_frame.end(), std::uint64_t{0});
        m.r_mean = static_cast<double>(sum) / static_cast<double>(m.frames);
    }
    m.ops_refractory = c.ops_refractory;
    m.ops_conv = c.ops_conv;
    m.ops_cluster = c.ops_cluster;
    m.ops_total = c.ops_total();
    return m;
}

CostInputs measured_inputs(const RunCounters& counters, const PipelineConfig& cfg,
                           std::int64_t bits_per_var) {
    const auto m = measure(counters);
    const auto geometry = cfg.conv_geometry();
    CostInputs in;
    in.k_inp = static_cast<std::int64_t>(counters.k_inp);
    in.alpha = m.alpha;
    in.w = cfg.window;
    in.f = static_cast<std::int64_t>(m.frames);
    in.r = static_cast<std::int64_t>(std::llround(m.r_mean));
    in.h = cfg.sensor.height;
    in.l = cfg.sensor.width;
    in.m = geometry.rows();
    in.n = geometry.cols();
    in.b = bits_per_var;
    return in;
}

std::string round_sig(double value, int digits) {
    if (value == 0.0 || !std::isfinite(value)) {
        std::ostringstream os;
        os << value;
        return os.str();
    }
    const int mag = static_cast<int>(std::floor(std::log10(std::fabs(value))));
    const double scale = std::pow(10.0, digits - 1 - mag);
    const double rounded = std::round(value * scale) / scale;
    const int decimals = std::max(0, digits - 1 - mag);
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << rounded;
    return os.str();
}

void write_report_text(std::ostream& os, const CostReport& rep, const CostInputs& in) {
    os << "inputs: K_inp=" << in.k_inp << " alpha=" << in.alpha << " W=" << in.w
       << " F=" << in.f << " r=" << in.r << " HxL=" << in.h << 'x' << in.l
       << " MxN=" << in.m << 'x' << in.n << " b=" << in.b << '\n';
    const double per_event = rep.per_event_streaming.to_double();
    os << "ops/event (streaming layers): " << round_sig(per_event) << " ("
       << round_sig(per_event / 1000.0) << " Kops/event, exact " << rep.per_event_streaming
       << ")\n";
    if (rep.per_event) {
        os << "ops/event (incl. clustering): " << round_sig(rep.per_event->to_double()) << '\n';
    }
    os << "ops total: " << rep.c_total << " (" << round_sig(rep.c_total.to_double()) << ")\n";
    os << "  refractory: " << rep.ops.refractory << '\n';
    os << "  convolution: " << rep.ops.conv << '\n';
    os << "  clustering: " << rep.ops.cluster << '\n';
    os << "memory: " << rep.b_total << " bits (" << round_sig(rep.b_total / 1e6) << " Mbits)\n";
    os << "  refractory membrane: " << rep.mem.refractory_membrane << '\n';
    os << "  refractory synapse: " << rep.mem.refractory_synapse << '\n';
    os << "  convolution membrane: " << rep.mem.conv_membrane << '\n';
    os << "  clustering buffer: " << rep.mem.cluster_buffer << '\n';
    os << "implementation state: " << rep.b_state << " bits (" << round_sig(rep.b_state / 1e6)
       << " Mbits)\n";
}

void write_report_csv(std::ostream& os, const CostReport& rep, const CostInputs& in) {
    os << "quantity,value\n";
    os << "k_inp," << in.k_inp << '\n';
    os << "alpha," << in.alpha.to_double() << '\n';
    os << "ops_total," << rep.c_total.to_double() << '\n';
    os << "ops_per_event_streaming," << rep.per_event_streaming.to_double() << '\n';
    if (rep.per_event) {
        os << "ops_per_event," << rep.per_event->to_double() << '\n';
    }
    os << "ops_refractory," << rep.ops.refractory.to_double() << '\n';
    os << "ops_conv," << rep.ops.conv.to_double() << '\n';
    os << "ops_cluster," << rep.ops.cluster.to_double() << '\n';
    os << "bits_total," << rep.b_total << '\n';
    os << "mbits_total," << round_sig(rep.b_total / 1e6) << '\n';
    os << "bits_refractory_membrane," << rep.mem.refractory_membrane << '\n';
    os << "bits_refractory_synapse," << rep.mem.refractory_synapse << '\n';
    os << "bits_conv_membrane," << rep.mem.conv_membrane << '\n';
    os << "bits_cluster_buffer," << rep.mem.cluster_buffer << '\n';
    os << "bits_implementation_state," << rep.b_state << '\n';
}

}  // namespace snnrpn::cost
