#pragma once

#include "emisim/waveform.hpp"

namespace emisim {

/// Component values of the self-oscillating capacitance-to-time converter.
struct CircuitParams {
    double r1 = 0.0;          // ohm, comparator divider top
    double r2 = 0.0;          // ohm, comparator divider bottom
    double r_ref = 0.0;       // ohm, integrator charging resistor
    double c_int = 0.0;       // F, integrator capacitor
    double c_off = 0.0;       // F, offset capacitance floor
    double c_sen = 0.0;       // F, sensing capacitance (>= c_off)
    double v_rail = 2.5;      // V, symmetric supply magnitude
    double edge_time = 1e-8;  // s, output rise/fall for waveform synthesis

    double k() const { return r1 / r2; }
    double j() const { return (c_sen - c_off) / c_int; }
};

/// Timing derived from the circuit: K, J, on/off times, frequency, duty.
struct TimingSolution {
    double k = 0.0;
    double j = 0.0;
    double t_on = 0.0;   // s
    double t_off = 0.0;  // s
    double f_osc = 0.0;  // Hz
    double duty = 0.0;   // t_on / (t_on + t_off)
};

/// Closed-form timing:
///   k = r1/r2, j = (c_sen - c_off)/c_int
///   t_on  = r_ref * c_int * k
///   t_off = r_ref * c_int * (k - 2j)
///   f_osc = 1 / (t_on + t_off)
/// Throws InvalidParams for non-positive components or c_sen < c_off,
/// NonOscillating when k <= 2j.
TimingSolution timing_from_params(const CircuitParams& p);

/// Inverse of the timing equations: duty cycle back to sensing capacitance.
///   c_sen = c_off + c_int * k * (2*duty - 1) / (2*duty)
/// duty must lie in [0.5, 1); p.c_sen is ignored.
double capacitance_from_duty(double duty, const CircuitParams& p);

struct TransientResult {
    SampledWaveform v_out;   // rail-to-rail comparator output (V_do)
    SampledWaveform v_node;  // integrator node voltage
    TimingSolution measured;  // extracted from v_out threshold crossings
};

/// Behavioral transient of the relaxation oscillator. The integrator node
/// ramps at +-v_rail/(r_ref*c_int) between the hysteresis thresholds
/// +-v_rail*k/2; entering the off phase the node takes a charge-injection
/// step of -2*v_rail*j coupled from the output swing through c_sen - c_off.
/// Threshold crossings are resolved exactly inside each sample step, so the
/// sampled node ramps carry no per-period drift.
///
/// Requires sample_rate >= 100*f_osc and duration >= 10 periods. Timing in
/// `measured` comes from 50%-of-swing crossings of v_out with linear
/// interpolation between samples.
TransientResult simulate_relaxation_transient(const CircuitParams& p, double duration,
                                              double sample_rate);

}  // namespace emisim
