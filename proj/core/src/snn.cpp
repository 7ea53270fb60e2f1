#include "snnrpn/snn.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace snnrpn::snn {

namespace {

void check_time(Timestamp last, Timestamp now) {
    if (now < last) {
        throw std::invalid_argument("time regression: t=" + std::to_string(now) +
                                    " precedes last update t=" + std::to_string(last));
    }
}

}  // namespace

void NeuronParams::validate() const {
    if (!(tau_m_us > 0.0)) {
        throw ConfigError("tau_m must be positive");
    }
    if (!(v_reset <= v_rest && v_rest < v_th)) {
        throw ConfigError("neuron potentials must satisfy v_reset <= v_rest < v_th");
    }
}

NeuronState advance_membrane(NeuronState state, const NeuronParams& params, Timestamp t_now) {
    check_time(state.t_last_update, t_now);
    const Timestamp dt = t_now - state.t_last_update;
    if (dt != 0) {
        const double decay = std::exp(-static_cast<double>(dt) / params.tau_m_us);
        state.v = params.v_rest + (state.v - params.v_rest) * decay;
    }
    state.t_last_update = t_now;
    return state;
}

DriveResult apply_drive(NeuronState state, const NeuronParams& params, double delta_v,
                        Timestamp t_now) {
    if (delta_v < 0.0) {
        throw std::invalid_argument("drive must be non-negative");
    }
    state = advance_membrane(state, params, t_now);
    if (state.in_refractory(params, t_now)) {
        return {state, false};
    }
    state.v += delta_v;
    if (state.v >= params.v_th) {
        state.v = params.v_reset;
        state.t_last_spike = t_now;
        return {state, true};
    }
    return {state, false};
}

ConductanceAccumulator advance_conductance(ConductanceAccumulator acc, Timestamp t_now) {
    check_time(acc.t_last_update, t_now);
    const Timestamp dt = t_now - acc.t_last_update;
    if (dt != 0 && acc.g_sum != 0.0) {
        acc.g_sum *= std::exp(-static_cast<double>(dt) / acc.tau_g_us);
    }
    acc.t_last_update = t_now;
    return acc;
}

ConductanceAccumulator add_conductance(ConductanceAccumulator acc, double weight,
                                       Timestamp t_now) {
    if (weight < 0.0) {
        throw std::invalid_argument("synaptic weight must be non-negative");
    }
    if (t_now != acc.t_last_update) {
        acc = advance_conductance(acc, t_now);
    }
    acc.g_sum += weight;
    return acc;
}

}  // namespace snnrpn::snn
