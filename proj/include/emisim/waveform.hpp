#pragma once

#include <Eigen/Core>

#include "emisim/errors.hpp"

namespace emisim {

using Eigen::ArrayXd;

/// Physical unit carried by a sampled series. Derivative units exist so that
/// d/dt keeps the tag meaningful instead of silently dropping it.
enum class Unit { volts, amperes, volts_per_second, amperes_per_second };

const char* unit_name(Unit u);

/// Uniformly sampled real-valued time series.
struct SampledWaveform {
    double sample_rate = 0.0;  // Hz
    double t0 = 0.0;           // start time, s
    Unit unit = Unit::volts;
    ArrayXd samples;

    Eigen::Index size() const { return samples.size(); }
    double dt() const { return 1.0 / sample_rate; }
    double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
    double time_at(Eigen::Index i) const { return t0 + static_cast<double>(i) / sample_rate; }
};

/// Throws InvalidParams unless sample_rate > 0, samples non-empty and all finite.
void check_waveform(const SampledWaveform& w);

/// Periodic trapezoidal pulse: rise, high plateau, fall, low plateau.
/// duty is the fraction of the period spent high, measured at 50 % of swing,
/// so the time average is exactly v_low + duty * (v_high - v_low).
struct TrapezoidSpec {
    double frequency = 0.0;  // Hz
    double v_low = 0.0;      // V
    double v_high = 0.0;     // V
    double duty = 0.5;       // (0,1)
    double rise = 0.0;       // s
    double fall = 0.0;       // s

    double period() const { return 1.0 / frequency; }
    double v_pp() const { return v_high - v_low; }
};

/// Throws InvalidSpec if the plateaus do not fit the period.
void check_trapezoid(const TrapezoidSpec& spec);

/// Value of one trapezoid period at time t (t is wrapped into [0, period)).
double trapezoid_value(const TrapezoidSpec& spec, double t);

/// Analytic Fourier coefficient magnitude (peak amplitude, not rms) of
/// harmonic n >= 1 of the trapezoid. Used as an oracle by tests and by the
/// near-field report's sanity checks.
double trapezoid_harmonic_amplitude(const TrapezoidSpec& spec, int n);

/// Sample the periodic trapezoid. Requires sample_rate > 2*frequency and
/// sample_rate*rise >= 2 (and likewise for fall) so edges are resolved.
SampledWaveform synth_trapezoid(const TrapezoidSpec& spec, double duration, double sample_rate);

/// Pure sine, mostly for tests and receiver calibration checks.
SampledWaveform synth_sine(double amplitude, double frequency, double phase, double duration,
                           double sample_rate, Unit unit = Unit::volts);

/// d/dt by second-order differences: central in the interior, 3-point
/// one-sided at the ends (both exact on polynomials of degree <= 2).
SampledWaveform differentiate(const SampledWaveform& w);

/// Capacitor current i(t) = C * dV/dt. Input must be in volts.
SampledWaveform displacement_current(const SampledWaveform& v, double capacitance);

}  // namespace emisim
