#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "emisim/lisn.hpp"
#include "emisim/nearfield.hpp"
#include "emisim/oscillator.hpp"
#include "emisim/receiver.hpp"

namespace emisim {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// A full conducted-emission experiment: oscillator, rail-current model,
/// LISN, receiver. parasitic_cm_capacitance is the node-to-reference path
/// turning the output swing into common-mode current.
struct Scenario {
    CircuitParams circuit;
    double parasitic_cm_capacitance = 10e-12;  // F
    LisnModel lisn;
    ReceiverSettings receiver;
    double duration = 0.0;     // s
    double sample_rate = 0.0;  // Hz
    std::string label;
};

struct NearfieldScenario {
    ElectrodeDrive drive;
    std::vector<double> frequencies;  // Hz
    ReceiverSettings receiver;
    double duration = 0.0;     // 0 = auto per point
    double sample_rate = 0.0;  // 0 = auto per point
    std::string label;
};

struct ConductedResult {
    Spectrum spectrum_p;
    Spectrum spectrum_n;
    ModalCurrents currents;
    TimingSolution timing;    // closed form
    TimingSolution measured;  // extracted from the transient
    SampledWaveform v_out;
    SampledWaveform v_node;
};

/// Oscillator transient -> rail currents (DM: integrator supply draw,
/// CM: output displacement current through the parasitic path) -> LISN ->
/// receiver sweep of both ports.
ConductedResult conducted_emission_pipeline(const Scenario& sc);

/// Either kind of config, depending on its "type" field.
struct LoadedConfig {
    std::string type;  // "conducted" | "nearfield"
    Scenario conducted;
    NearfieldScenario nearfield;
};

LoadedConfig load_config(const std::filesystem::path& path);

struct RunOutput {
    std::string type;
    std::vector<std::string> files;  // relative to out_dir
};

/// Execute a config and write spectra/report CSVs plus manifest.json into
/// out_dir (created if missing). Deterministic for identical configs.
RunOutput run_config(const std::filesystem::path& config_path,
                     const std::filesystem::path& out_dir, bool dump_waveforms = false);

struct HarmonicRow {
    int harmonic = 0;
    double freq = 0.0;
    double level_a = 0.0;
    double level_b = 0.0;
    double delta = 0.0;  // a - b
};

struct CompareReport {
    std::string label_a;
    std::string label_b;
    double f1 = 0.0, f2 = 0.0;
    double band_power_a = 0.0;
    double band_power_b = 0.0;
    double delta = 0.0;  // a - b
    std::string winner;  // label of the quieter run in the band
    std::vector<HarmonicRow> harmonics;
};

/// Compare the V_P spectra of two run directories over a band. The harmonic
/// table follows run A's oscillation frequency.
CompareReport compare_emissions(const std::filesystem::path& run_a,
                                const std::filesystem::path& run_b, double f1, double f2);

}  // namespace emisim
