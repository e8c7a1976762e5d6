#pragma once

#include <complex>
#include <utility>

#include "emisim/waveform.hpp"

namespace emisim {

/// Per-line artificial network presenting the 50 ohm measurement port.
/// Topology: line inductor from the supply node to reference, coupling
/// capacitor (with the bleed resistor across it) from the supply node to the
/// port node, measurement resistor from the port node to reference.
struct LisnModel {
    double line_inductance = 50e-6;        // H
    double measurement_resistance = 50.0;  // ohm, fixed by the modal equations
    double coupling_capacitance = 0.1e-6;  // F
    double bleed_resistance = 1000.0;      // ohm
};

void check_lisn(const LisnModel& m);

struct PortVoltages {
    SampledWaveform v_p;  // +rail port, V
    SampledWaveform v_n;  // -rail port, V
};

struct ModalCurrents {
    SampledWaveform i_cm;  // common mode, A
    SampledWaveform i_dm;  // differential mode, A
};

/// V_P = 50 * (I_CM + I_DM), V_N = 50 * (I_CM - I_DM), pointwise.
PortVoltages modal_compose(const ModalCurrents& m);

/// Exact inverse: I_CM = (V_P + V_N)/100, I_DM = (V_P - V_N)/100.
ModalCurrents modal_decompose(const PortVoltages& pv);

/// Analytic transfer impedance V_port(s)/I_rail(s) at s = j*2*pi*f.
std::complex<double> lisn_impedance(const LisnModel& m, double frequency);

/// Second-order section, denominator normalized to a0 = 1.
struct BiquadCoeffs {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// Bilinear-transform discretization of the LISN transfer impedance.
/// prewarp_hz > 0 makes the discrete response match the analog one exactly
/// at that frequency; 0 matches at DC.
BiquadCoeffs lisn_filter_coeffs(const LisnModel& m, double sample_rate, double prewarp_hz = 0.0);

/// Frequency response of a discretized section at `frequency`.
std::complex<double> biquad_response(const BiquadCoeffs& c, double frequency, double sample_rate);

/// Run a biquad over a waveform (direct form II transposed, zero state).
ArrayXd biquad_filter(const BiquadCoeffs& c, const ArrayXd& x);

/// Filter both rail currents through the LISN transfer impedance.
PortVoltages lisn_response(const SampledWaveform& i_rail_p, const SampledWaveform& i_rail_n,
                           const LisnModel& m, double prewarp_hz = 0.0);

}  // namespace emisim
