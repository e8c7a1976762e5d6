#pragma once

#include <vector>

#include "emisim/waveform.hpp"

namespace emisim {

enum class Detector { peak, average };

/// Virtual EMI receiver configuration. rbw is the width of the Gaussian
/// analysis window at rbw_attenuation_db below its peak response; EMC
/// receivers quote the -6 dB width, so that is the default.
struct ReceiverSettings {
    double f_start = 150e3;  // Hz
    double f_stop = 108e6;   // Hz
    double rbw = 9e3;        // Hz
    double overlap = 0.95;   // fraction of the window shared between segments
    Detector detector = Detector::peak;
    double rbw_attenuation_db = 6.0;
    int threads = 0;  // segment workers; 0 = hardware concurrency
};

void check_settings(const ReceiverSettings& s);

/// Reported level for a zero-magnitude bin.
constexpr double kFloorDbuv = -200.0;

struct Spectrum {
    ArrayXd freqs;    // Hz, strictly increasing
    ArrayXd levels;   // dBuV
    double rbw = 0.0;  // analysis bandwidth that produced it; 0 when unknown

    Eigen::Index size() const { return freqs.size(); }
};

void check_spectrum(const Spectrum& s);

/// 20*log10(v / 1uV). v must be >= 0; zero maps to kFloorDbuv.
double to_dbuv(double volts);

/// Inverse of to_dbuv.
double from_dbuv(double level_db);

/// Swept spectral measurement of a waveform.
///
/// Short-time transform with a Gaussian window whose rbw_attenuation_db
/// width equals rbw, hop (1-overlap)*window, detector applied per bin across
/// segments. Levels are calibrated so a sine of rms r reports to_dbuv(r).
/// Bins are spaced rbw/4 from f_start to f_stop.
///
/// Requires sample_rate > 2*f_stop and duration >= 10/rbw. Deterministic:
/// parallel segment evaluation reduces in segment order and yields exactly
/// the serial result.
Spectrum sweep(const SampledWaveform& w, const ReceiverSettings& s);

struct CombPeak {
    int harmonic = 0;
    double freq = 0.0;      // Hz, bin of the detected maximum
    double level = 0.0;     // dBuV
};

/// Local maxima within +-tolerance of each n*f0 (n = 1..n_max) that stand
/// prominence_db above the surrounding valley floor. tolerance defaults to
/// the spectrum's rbw (or 4 bins when unknown).
std::vector<CombPeak> comb_peaks(const Spectrum& spec, double f0, int n_max,
                                 double prominence_db, double tolerance = 0.0);

/// Power sum 10*log10(sum 10^(level/10)) over bins with f1 <= f <= f2.
double band_power(const Spectrum& spec, double f1, double f2);

}  // namespace emisim
