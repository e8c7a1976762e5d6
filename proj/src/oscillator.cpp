#include "emisim/oscillator.hpp"

#include <cmath>
#include <vector>

namespace emisim {

namespace {

void check_components(const CircuitParams& p, bool require_c_sen) {
    if (!(p.r1 > 0.0 && p.r2 > 0.0 && p.r_ref > 0.0))
        throw InvalidParams("resistances must be strictly positive");
    if (!(p.c_int > 0.0 && p.c_off > 0.0))
        throw InvalidParams("capacitances must be strictly positive");
    if (!(p.v_rail > 0.0)) throw InvalidParams("v_rail must be strictly positive");
    if (p.edge_time < 0.0) throw InvalidParams("edge_time must be >= 0");
    if (require_c_sen) {
        if (!(p.c_sen > 0.0)) throw InvalidParams("c_sen must be strictly positive");
        if (p.c_sen < p.c_off)
            throw InvalidParams("c_sen below the offset floor c_off (negative j)");
    }
}

struct SwitchEvent {
    double time;
    bool rising;  // output goes low -> high
};

}  // namespace

TimingSolution timing_from_params(const CircuitParams& p) {
    check_components(p, true);
    TimingSolution ts;
    ts.k = p.k();
    ts.j = p.j();
    if (ts.k <= 2.0 * ts.j)
        throw NonOscillating("k <= 2j: off time collapses, circuit latches");
    ts.t_on = p.r_ref * p.c_int * ts.k;
    ts.t_off = p.r_ref * p.c_int * (ts.k - 2.0 * ts.j);
    ts.f_osc = 1.0 / (ts.t_on + ts.t_off);
    ts.duty = ts.t_on * ts.f_osc;
    if (!(p.edge_time < ts.t_on && p.edge_time < ts.t_off))
        throw InvalidParams("edge_time must be shorter than both t_on and t_off");
    return ts;
}

double capacitance_from_duty(double duty, const CircuitParams& p) {
    if (!(duty >= 0.5 && duty < 1.0))
        throw OutOfRange("duty must lie in [0.5, 1)");
    check_components(p, false);
    return p.c_off + p.c_int * p.k() * (2.0 * duty - 1.0) / (2.0 * duty);
}

TransientResult simulate_relaxation_transient(const CircuitParams& p, double duration,
                                              double sample_rate) {
    const TimingSolution closed = timing_from_params(p);
    if (sample_rate < 100.0 * closed.f_osc)
        throw UnderSampled("transient needs sample_rate >= 100 * f_osc");
    if (duration < 10.0 / closed.f_osc)
        throw TooShort("transient needs at least 10 oscillation periods");

    const auto n = static_cast<Eigen::Index>(std::llround(duration * sample_rate));
    const double dt = 1.0 / sample_rate;
    const double slope_mag = p.v_rail / (p.r_ref * p.c_int);
    const double v_th = 0.5 * p.v_rail * closed.k;
    const double injection = 2.0 * p.v_rail * closed.j;

    TransientResult res;
    res.v_node.sample_rate = sample_rate;
    res.v_node.unit = Unit::volts;
    res.v_node.samples.resize(n);
    res.v_out.sample_rate = sample_rate;
    res.v_out.unit = Unit::volts;
    res.v_out.samples.resize(n);

    // Integrate the node. Each sample step is split at threshold crossings,
    // which the piecewise-linear model locates exactly.
    std::vector<SwitchEvent> events;
    events.reserve(static_cast<size_t>(duration * closed.f_osc * 2.0) + 4);
    events.push_back({0.0, true});  // start at the beginning of an on phase

    bool phase_on = true;
    double v = -v_th;
    for (Eigen::Index i = 0; i < n; ++i) {
        res.v_node.samples[i] = v;
        double remaining = dt;
        while (remaining > 0.0) {
            const double to_threshold = phase_on ? (v_th - v) / slope_mag : (v + v_th) / slope_mag;
            if (to_threshold > remaining) {
                v += (phase_on ? slope_mag : -slope_mag) * remaining;
                break;
            }
            const double t_event = static_cast<double>(i) * dt + (dt - remaining) + to_threshold;
            if (phase_on) {
                v = v_th - injection;  // output falls; charge injection through c_sen - c_off
                events.push_back({t_event, false});
            } else {
                v = -v_th;
                events.push_back({t_event, true});
            }
            phase_on = !phase_on;
            remaining -= to_threshold;
        }
    }

    // Output waveform: plateaus at +-v_rail with trapezoidal edges of width
    // edge_time starting at each switch event. Events are spaced further
    // apart than edge_time, so at most one edge is active at a time.
    size_t cursor = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        while (cursor + 1 < events.size() && events[cursor + 1].time <= t) ++cursor;
        const SwitchEvent& e = events[cursor];
        const double target = e.rising ? p.v_rail : -p.v_rail;
        double value = target;
        if (p.edge_time > 0.0 && t < e.time + p.edge_time)
            value = -target + 2.0 * target * (t - e.time) / p.edge_time;
        res.v_out.samples[i] = value;
    }

    // Timing extraction: 50%-of-swing (zero) crossings, linearly interpolated.
    std::vector<double> rising, falling;
    const ArrayXd& out = res.v_out.samples;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        const bool up = out[i] < 0.0 && out[i + 1] >= 0.0;
        const bool down = out[i] >= 0.0 && out[i + 1] < 0.0;
        if (!up && !down) continue;
        const double frac = (0.0 - out[i]) / (out[i + 1] - out[i]);
        const double t_cross = (static_cast<double>(i) + frac) * dt;
        (up ? rising : falling).push_back(t_cross);
    }

    double on_sum = 0.0, off_sum = 0.0;
    int on_count = 0, off_count = 0;
    size_t fi = 0;
    for (size_t ri = 0; ri + 1 < rising.size(); ++ri) {
        while (fi < falling.size() && falling[fi] < rising[ri]) ++fi;
        if (fi >= falling.size() || falling[fi] >= rising[ri + 1]) continue;
        on_sum += falling[fi] - rising[ri];
        ++on_count;
        off_sum += rising[ri + 1] - falling[fi];
        ++off_count;
    }
    if (on_count < 2 || off_count < 2)
        throw TooShort("transient too short to extract at least two full periods");

    TimingSolution& m = res.measured;
    m.t_on = on_sum / on_count;
    m.t_off = off_sum / off_count;
    m.f_osc = 1.0 / (m.t_on + m.t_off);
    m.duty = m.t_on * m.f_osc;
    m.k = m.t_on / (p.r_ref * p.c_int);
    m.j = 0.5 * (m.k - m.t_off / (p.r_ref * p.c_int));
    return res;
}

}  // namespace emisim
