#include "emisim/nearfield.hpp"

#include <algorithm>
#include <cmath>

namespace emisim {

TrapezoidSpec retune_pulse(const ElectrodeDrive& d, double f0) {
    if (!(f0 > 0.0)) throw InvalidParams("drive frequency must be positive");
    TrapezoidSpec p = d.pulse;
    if (d.edge_policy == EdgePolicy::scale_with_period) {
        const double scale = d.pulse.frequency / f0;
        p.rise = d.pulse.rise * scale;
        p.fall = d.pulse.fall * scale;
    }
    p.frequency = f0;
    return p;
}

double nearfield_auto_sample_rate(const TrapezoidSpec& pulse, const ReceiverSettings& s) {
    double fs = 2.5 * s.f_stop;
    if (pulse.rise > 0.0) fs = std::max(fs, 2.5 / pulse.rise);
    if (pulse.fall > 0.0) fs = std::max(fs, 2.5 / pulse.fall);
    return fs;
}

double nearfield_auto_duration(const TrapezoidSpec& pulse, const ReceiverSettings& s) {
    return std::max(12.0 / s.rbw, 10.0 / pulse.frequency);
}

Spectrum electrode_emission(const ElectrodeDrive& d, const ReceiverSettings& s, double duration,
                            double sample_rate) {
    if (!(d.c_electrode > 0.0)) throw InvalidParams("electrode capacitance must be positive");
    const SampledWaveform v = synth_trapezoid(d.pulse, duration, sample_rate);
    const SampledWaveform i = displacement_current(v, d.c_electrode);

    // Probe chain: transimpedance coupling then flat preamp gain.
    SampledWaveform probe;
    probe.sample_rate = i.sample_rate;
    probe.t0 = i.t0;
    probe.unit = Unit::volts;
    probe.samples =
        i.samples * std::pow(10.0, (d.coupling_gain_db + d.preamp_gain_db) / 20.0);
    return sweep(probe, s);
}

std::vector<NearfieldPoint> frequency_sweep_report(const ElectrodeDrive& d,
                                                   const std::vector<double>& freqs,
                                                   const ReceiverSettings& s, double duration,
                                                   double sample_rate) {
    if (freqs.empty()) throw InvalidParams("frequency sweep needs at least one point");
    std::vector<NearfieldPoint> rows;
    rows.reserve(freqs.size());
    for (const double f0 : freqs) {
        ElectrodeDrive point = d;
        point.pulse = retune_pulse(d, f0);
        const double fs = sample_rate > 0.0 ? sample_rate
                                            : nearfield_auto_sample_rate(point.pulse, s);
        const double dur = duration > 0.0 ? duration : nearfield_auto_duration(point.pulse, s);

        const Spectrum spec = electrode_emission(point, s, dur, fs);

        NearfieldPoint row;
        row.drive_freq = f0;
        row.sample_rate = fs;
        row.duration = dur;
        const auto peaks = comb_peaks(spec, f0, 1, 6.0);
        if (!peaks.empty()) {
            row.fundamental = peaks.front().level;
            row.fundamental_freq = peaks.front().freq;
        } else {
            // Fall back to the bin nearest the drive frequency.
            Eigen::Index nearest = 0;
            (spec.freqs - f0).abs().minCoeff(&nearest);
            row.fundamental = spec.levels[nearest];
            row.fundamental_freq = spec.freqs[nearest];
        }
        row.band_power = band_power(spec, s.f_start, s.f_stop);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace emisim
