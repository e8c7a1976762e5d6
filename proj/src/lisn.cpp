#include "emisim/lisn.hpp"

#include <cmath>

namespace emisim {

namespace {

constexpr double kModalResistance = 50.0;  // the constant baked into the modal equations

void check_pair(const SampledWaveform& a, const SampledWaveform& b, Unit expected) {
    check_waveform(a);
    check_waveform(b);
    if (a.unit != expected || b.unit != expected)
        throw UnitMismatch(std::string("expected both waveforms in ") + unit_name(expected));
    if (a.samples.size() != b.samples.size())
        throw LengthMismatch("waveform pair lengths differ");
    if (a.sample_rate != b.sample_rate)
        throw SampleRateMismatch("waveform pair sample rates differ");
}

}  // namespace

void check_lisn(const LisnModel& m) {
    if (!(m.line_inductance > 0.0 && m.coupling_capacitance > 0.0 && m.bleed_resistance > 0.0))
        throw InvalidParams("LISN component values must be strictly positive");
    if (m.measurement_resistance != kModalResistance)
        throw InvalidParams("LISN measurement resistance is fixed at 50 ohm");
}

PortVoltages modal_compose(const ModalCurrents& m) {
    check_pair(m.i_cm, m.i_dm, Unit::amperes);
    PortVoltages pv;
    pv.v_p.sample_rate = pv.v_n.sample_rate = m.i_cm.sample_rate;
    pv.v_p.t0 = pv.v_n.t0 = m.i_cm.t0;
    pv.v_p.unit = pv.v_n.unit = Unit::volts;
    pv.v_p.samples = kModalResistance * (m.i_cm.samples + m.i_dm.samples);
    pv.v_n.samples = kModalResistance * (m.i_cm.samples - m.i_dm.samples);
    return pv;
}

ModalCurrents modal_decompose(const PortVoltages& pv) {
    check_pair(pv.v_p, pv.v_n, Unit::volts);
    ModalCurrents m;
    m.i_cm.sample_rate = m.i_dm.sample_rate = pv.v_p.sample_rate;
    m.i_cm.t0 = m.i_dm.t0 = pv.v_p.t0;
    m.i_cm.unit = m.i_dm.unit = Unit::amperes;
    m.i_cm.samples = (pv.v_p.samples + pv.v_n.samples) / (2.0 * kModalResistance);
    m.i_dm.samples = (pv.v_p.samples - pv.v_n.samples) / (2.0 * kModalResistance);
    return m;
}

std::complex<double> lisn_impedance(const LisnModel& m, double frequency) {
    check_lisn(m);
    const std::complex<double> s(0.0, 2.0 * M_PI * frequency);
    const double L = m.line_inductance;
    const double C = m.coupling_capacitance;
    const double rb = m.bleed_resistance;
    const double rm = m.measurement_resistance;
    // Z_t(s) = s*L*rm / (s*L + rm + rb/(1 + s*C*rb))
    const std::complex<double> z_couple = rb / (1.0 + s * C * rb);
    return s * L * rm / (s * L + rm + z_couple);
}

BiquadCoeffs lisn_filter_coeffs(const LisnModel& m, double sample_rate, double prewarp_hz) {
    check_lisn(m);
    if (!(sample_rate > 0.0)) throw InvalidParams("sample_rate must be positive");
    const double L = m.line_inductance;
    const double C = m.coupling_capacitance;
    const double rb = m.bleed_resistance;
    const double rm = m.measurement_resistance;

    // Z_t(s) = (B2 s^2 + B1 s) / (A2 s^2 + A1 s + A0)
    const double B2 = rm * L * C * rb;
    const double B1 = rm * L;
    const double B0 = 0.0;
    const double A2 = L * C * rb;
    const double A1 = L + rm * C * rb;
    const double A0 = rm + rb;

    double K = 2.0 * sample_rate;
    if (prewarp_hz > 0.0) {
        const double w0 = 2.0 * M_PI * prewarp_hz;
        if (!(prewarp_hz < 0.5 * sample_rate))
            throw InvalidParams("prewarp frequency must be below Nyquist");
        K = w0 / std::tan(0.5 * w0 / sample_rate);
    }

    const double nb0 = B2 * K * K + B1 * K + B0;
    const double nb1 = 2.0 * (B0 - B2 * K * K);
    const double nb2 = B2 * K * K - B1 * K + B0;
    const double na0 = A2 * K * K + A1 * K + A0;
    const double na1 = 2.0 * (A0 - A2 * K * K);
    const double na2 = A2 * K * K - A1 * K + A0;

    BiquadCoeffs c;
    c.b0 = nb0 / na0;
    c.b1 = nb1 / na0;
    c.b2 = nb2 / na0;
    c.a1 = na1 / na0;
    c.a2 = na2 / na0;
    return c;
}

std::complex<double> biquad_response(const BiquadCoeffs& c, double frequency, double sample_rate) {
    const double theta = 2.0 * M_PI * frequency / sample_rate;
    const std::complex<double> z1 = std::polar(1.0, -theta);
    const std::complex<double> z2 = z1 * z1;
    return (c.b0 + c.b1 * z1 + c.b2 * z2) / (1.0 + c.a1 * z1 + c.a2 * z2);
}

ArrayXd biquad_filter(const BiquadCoeffs& c, const ArrayXd& x) {
    ArrayXd y(x.size());
    double s1 = 0.0, s2 = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        const double yi = c.b0 * xi + s1;
        s1 = c.b1 * xi - c.a1 * yi + s2;
        s2 = c.b2 * xi - c.a2 * yi;
        y[i] = yi;
    }
    return y;
}

PortVoltages lisn_response(const SampledWaveform& i_rail_p, const SampledWaveform& i_rail_n,
                           const LisnModel& m, double prewarp_hz) {
    check_pair(i_rail_p, i_rail_n, Unit::amperes);
    const BiquadCoeffs c = lisn_filter_coeffs(m, i_rail_p.sample_rate, prewarp_hz);
    PortVoltages pv;
    pv.v_p.sample_rate = pv.v_n.sample_rate = i_rail_p.sample_rate;
    pv.v_p.t0 = pv.v_n.t0 = i_rail_p.t0;
    pv.v_p.unit = pv.v_n.unit = Unit::volts;
    pv.v_p.samples = biquad_filter(c, i_rail_p.samples);
    pv.v_n.samples = biquad_filter(c, i_rail_n.samples);
    return pv;
}

}  // namespace emisim
