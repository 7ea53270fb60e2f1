#pragma once

#include <optional>

#include "snnrpn/types.hpp"

// Event-driven leaky integrate-and-fire neurons and exponential synapses.
//
// Between events the membrane relaxes toward rest and synaptic conductance
// decays; both are linear first-order ODEs, so the state is advanced with the
// closed-form exponential instead of stepping in time.
//
//   tau_m dV/dt = -(V - V_rest) + R I(t)
//   tau_g dg/dt = -g
//
// Input pulses are folded into instantaneous increments of V.
namespace snnrpn::snn {

struct NeuronParams {
    double tau_m_us = 20'000.0;
    double r_mem = 1.0;
    double v_rest = 0.0;
    double v_th = 1.0;
    double v_reset = 0.0;
    Timestamp t_refractory_us = 0;

    // Throws ConfigError unless tau_m > 0 and v_reset <= v_rest < v_th.
    void validate() const;
};

struct NeuronState {
    double v = 0.0;
    Timestamp t_last_update = 0;
    std::optional<Timestamp> t_last_spike;

    static NeuronState rested(const NeuronParams& p, Timestamp t0 = 0) {
        return NeuronState{p.v_rest, t0, std::nullopt};
    }

    bool in_refractory(const NeuronParams& p, Timestamp t) const {
        return t_last_spike && t < *t_last_spike + p.t_refractory_us;
    }
};

struct ConductanceAccumulator {
    double g_sum = 0.0;
    Timestamp t_last_update = 0;
    double tau_g_us = 5'000.0;
};

struct DriveResult {
    NeuronState state;
    bool spiked = false;
};

// Relax V toward v_rest over [t_last_update, t_now]. Throws std::invalid_argument
// on time regression.
NeuronState advance_membrane(NeuronState state, const NeuronParams& params, Timestamp t_now);

// Advance to t_now, then add delta_v unless the neuron is refractory. Crossing
// v_th fires and resets to v_reset. Drive arriving during the refractory
// window is discarded.
DriveResult apply_drive(NeuronState state, const NeuronParams& params, double delta_v,
                        Timestamp t_now);

ConductanceAccumulator advance_conductance(ConductanceAccumulator acc, Timestamp t_now);

// Caller advances first. Negative weights are rejected; the network is
// excitatory only.
ConductanceAccumulator add_conductance(ConductanceAccumulator acc, double weight,
                                       Timestamp t_now);

}  // namespace snnrpn::snn
