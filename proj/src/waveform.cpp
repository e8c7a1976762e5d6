#include "emisim/waveform.hpp"

#include <cmath>
#include <complex>

namespace emisim {

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

}  // namespace

const char* unit_name(Unit u) {
    switch (u) {
        case Unit::volts: return "V";
        case Unit::amperes: return "A";
        case Unit::volts_per_second: return "V/s";
        case Unit::amperes_per_second: return "A/s";
    }
    return "?";
}

void check_waveform(const SampledWaveform& w) {
    if (!(w.sample_rate > 0.0)) throw InvalidParams("waveform sample_rate must be positive");
    if (w.samples.size() == 0) throw InvalidParams("waveform has no samples");
    if (!w.samples.allFinite()) throw InvalidParams("waveform contains non-finite samples");
}

void check_trapezoid(const TrapezoidSpec& s) {
    if (!(s.frequency > 0.0)) throw InvalidSpec("trapezoid frequency must be positive");
    if (!(s.v_high > s.v_low)) throw InvalidSpec("trapezoid needs v_high > v_low");
    if (!(s.duty > 0.0 && s.duty < 1.0)) throw InvalidSpec("trapezoid duty must be in (0,1)");
    if (s.rise < 0.0 || s.fall < 0.0) throw InvalidSpec("trapezoid edge times must be >= 0");
    const double T = s.period();
    if (!(s.rise + s.fall < T)) throw InvalidSpec("trapezoid edges do not fit into one period");
    if (!(s.duty * T > s.rise)) throw InvalidSpec("trapezoid high time shorter than rise time");
    const double high_plateau = s.duty * T - 0.5 * (s.rise + s.fall);
    const double low_plateau = (1.0 - s.duty) * T - 0.5 * (s.rise + s.fall);
    if (!(high_plateau > 0.0) || !(low_plateau > 0.0))
        throw InvalidSpec("trapezoid plateaus vanish for this duty/edge combination");
}

double trapezoid_value(const TrapezoidSpec& s, double t) {
    const double T = s.period();
    double u = std::fmod(t, T);
    if (u < 0.0) u += T;
    const double dv = s.v_pp();
    const double high_plateau = s.duty * T - 0.5 * (s.rise + s.fall);
    if (u < s.rise) return s.v_low + dv * u / s.rise;
    u -= s.rise;
    if (u < high_plateau) return s.v_high;
    u -= high_plateau;
    if (u < s.fall) return s.v_high - dv * u / s.fall;
    return s.v_low;
}

double trapezoid_harmonic_amplitude(const TrapezoidSpec& s, int n) {
    if (n < 1) throw InvalidParams("harmonic index must be >= 1");
    const double T = s.period();
    const double w = 2.0 * M_PI * s.frequency * n;
    const double high_plateau = s.duty * T - 0.5 * (s.rise + s.fall);
    const double t_fall = s.rise + high_plateau;  // fall start
    const std::complex<double> j(0.0, 1.0);
    // Fourier transform of dv/dt (two rectangular pulses), divided by jnw.
    const std::complex<double> up =
        std::exp(-j * (0.5 * w * s.rise)) * sinc(0.5 * w * s.rise);
    const std::complex<double> down =
        std::exp(-j * (w * (t_fall + 0.5 * s.fall))) * sinc(0.5 * w * s.fall);
    const double dv = s.v_pp();
    return 2.0 / (w * T) * std::abs(dv * (up - down));
}

SampledWaveform synth_trapezoid(const TrapezoidSpec& spec, double duration, double sample_rate) {
    check_trapezoid(spec);
    if (!(sample_rate > 2.0 * spec.frequency))
        throw UnderSampled("trapezoid sample_rate must exceed 2x frequency");
    if (sample_rate * spec.rise < 2.0 || sample_rate * spec.fall < 2.0)
        throw UnderSampled("trapezoid edges need at least 2 samples");
    const auto n = static_cast<Eigen::Index>(std::llround(duration * sample_rate));
    if (n < 1) throw InvalidParams("trapezoid duration too short for one sample");

    SampledWaveform w;
    w.sample_rate = sample_rate;
    w.unit = Unit::volts;
    w.samples.resize(n);
    const double dt = 1.0 / sample_rate;
    for (Eigen::Index i = 0; i < n; ++i)
        w.samples[i] = trapezoid_value(spec, static_cast<double>(i) * dt);
    return w;
}

SampledWaveform synth_sine(double amplitude, double frequency, double phase, double duration,
                           double sample_rate, Unit unit) {
    if (!(sample_rate > 2.0 * frequency)) throw UnderSampled("sine frequency above Nyquist");
    const auto n = static_cast<Eigen::Index>(std::llround(duration * sample_rate));
    if (n < 1) throw InvalidParams("sine duration too short for one sample");

    SampledWaveform w;
    w.sample_rate = sample_rate;
    w.unit = unit;
    const double dt = 1.0 / sample_rate;
    ArrayXd t = ArrayXd::LinSpaced(n, 0.0, static_cast<double>(n - 1) * dt);
    w.samples = amplitude * (2.0 * M_PI * frequency * t + phase).sin();
    return w;
}

SampledWaveform differentiate(const SampledWaveform& w) {
    check_waveform(w);
    const Eigen::Index n = w.samples.size();
    if (n < 3) throw TooShort("differentiate needs at least 3 samples");

    Unit out_unit;
    switch (w.unit) {
        case Unit::volts: out_unit = Unit::volts_per_second; break;
        case Unit::amperes: out_unit = Unit::amperes_per_second; break;
        default: throw UnitMismatch("cannot differentiate a rate waveform again");
    }

    SampledWaveform d;
    d.sample_rate = w.sample_rate;
    d.t0 = w.t0;
    d.unit = out_unit;
    d.samples.resize(n);
    const double half_fs = 0.5 * w.sample_rate;
    const ArrayXd& x = w.samples;
    d.samples.segment(1, n - 2) = (x.segment(2, n - 2) - x.segment(0, n - 2)) * half_fs;
    d.samples[0] = (-3.0 * x[0] + 4.0 * x[1] - x[2]) * half_fs;
    d.samples[n - 1] = (3.0 * x[n - 1] - 4.0 * x[n - 2] + x[n - 3]) * half_fs;
    return d;
}

SampledWaveform displacement_current(const SampledWaveform& v, double capacitance) {
    if (v.unit != Unit::volts)
        throw UnitMismatch(std::string("displacement_current expects volts, got ") +
                           unit_name(v.unit));
    if (!(capacitance > 0.0)) throw InvalidParams("capacitance must be positive");
    SampledWaveform i = differentiate(v);
    i.samples *= capacitance;
    i.unit = Unit::amperes;
    return i;
}

}  // namespace emisim
