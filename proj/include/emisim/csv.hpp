#pragma once

#include <filesystem>
#include <vector>

#include "emisim/nearfield.hpp"
#include "emisim/receiver.hpp"
#include "emisim/waveform.hpp"

namespace emisim {

/// Columns: freq_hz,level_dbuv
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec);
Spectrum read_spectrum_csv(const std::filesystem::path& path);

/// Columns: time_s,value
void write_waveform_csv(const std::filesystem::path& path, const SampledWaveform& w);

/// Columns: drive_freq_hz,fundamental_dbuv,band_power_dbuv
void write_nearfield_csv(const std::filesystem::path& path,
                         const std::vector<NearfieldPoint>& rows);

}  // namespace emisim
