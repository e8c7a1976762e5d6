#pragma once

#include <vector>

#include "emisim/receiver.hpp"
#include "emisim/waveform.hpp"

namespace emisim {

/// How the drive edges behave when the pulse is retuned to a new frequency.
enum class EdgePolicy { scale_with_period, fixed };

/// Electrode drive plus the probe chain it is observed through.
/// coupling_gain_db maps electrode current to probe voltage (dB re 1 V/A);
/// preamp_gain_db is applied flat; field_rejection_db only qualifies the
/// probe's selectivity and enters no signal path.
struct ElectrodeDrive {
    TrapezoidSpec pulse{1e6, 0.0, 5.0, 0.5, 5e-8, 5e-8};
    double c_electrode = 100e-12;    // F, electrode to ground
    double field_rejection_db = 30.0;
    double preamp_gain_db = 38.0;
    double coupling_gain_db = 0.0;
    EdgePolicy edge_policy = EdgePolicy::scale_with_period;
};

/// The drive pulse retuned to f0 under the drive's edge policy.
TrapezoidSpec retune_pulse(const ElectrodeDrive& d, double f0);

/// Smallest sample rate that resolves both the receiver span and the edges.
double nearfield_auto_sample_rate(const TrapezoidSpec& pulse, const ReceiverSettings& s);

/// Duration giving the receiver enough segments and >= 10 drive periods.
double nearfield_auto_duration(const TrapezoidSpec& pulse, const ReceiverSettings& s);

/// Near-field emission spectrum of one drive point: synthesize the pulse,
/// take the displacement current through c_electrode, convert to probe
/// voltage through the gain chain, sweep.
Spectrum electrode_emission(const ElectrodeDrive& d, const ReceiverSettings& s, double duration,
                            double sample_rate);

struct NearfieldPoint {
    double drive_freq = 0.0;        // Hz
    double fundamental = 0.0;       // dBuV at the fundamental peak
    double fundamental_freq = 0.0;  // Hz of the detected peak bin
    double band_power = 0.0;        // dBuV over [f_start, f_stop]
    double sample_rate = 0.0;       // Hz actually used
    double duration = 0.0;          // s actually used
};

/// One electrode_emission per frequency. duration/sample_rate of 0 pick
/// per-point values automatically.
std::vector<NearfieldPoint> frequency_sweep_report(const ElectrodeDrive& d,
                                                   const std::vector<double>& freqs,
                                                   const ReceiverSettings& s,
                                                   double duration = 0.0,
                                                   double sample_rate = 0.0);

}  // namespace emisim
