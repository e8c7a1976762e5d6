#include "emisim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace emisim {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // LF terminators on every platform
    if (!out) throw IoError("cannot open for writing: " + path.string());
    return out;
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

}  // namespace

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum& spec) {
    check_spectrum(spec);
    auto out = open_out(path);
    out << "freq_hz,level_dbuv\n";
    for (Eigen::Index i = 0; i < spec.size(); ++i)
        out << fmt("%.10g", spec.freqs[i]) << ',' << fmt("%.4f", spec.levels[i]) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

Spectrum read_spectrum_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifact("cannot open spectrum: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "freq_hz,level_dbuv")
        throw IoError("not a spectrum CSV (bad header): " + path.string());
    std::vector<double> freqs, levels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw IoError("malformed spectrum row in " + path.string());
        try {
            freqs.push_back(std::stod(line.substr(0, comma)));
            levels.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw IoError("malformed spectrum row in " + path.string());
        }
    }
    Spectrum spec;
    spec.freqs = Eigen::Map<const ArrayXd>(freqs.data(), static_cast<Eigen::Index>(freqs.size()));
    spec.levels =
        Eigen::Map<const ArrayXd>(levels.data(), static_cast<Eigen::Index>(levels.size()));
    check_spectrum(spec);
    return spec;
}

void write_waveform_csv(const std::filesystem::path& path, const SampledWaveform& w) {
    check_waveform(w);
    auto out = open_out(path);
    out << "time_s,value\n";
    for (Eigen::Index i = 0; i < w.size(); ++i)
        out << fmt("%.12g", w.time_at(i)) << ',' << fmt("%.10g", w.samples[i]) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

void write_nearfield_csv(const std::filesystem::path& path,
                         const std::vector<NearfieldPoint>& rows) {
    auto out = open_out(path);
    out << "drive_freq_hz,fundamental_dbuv,band_power_dbuv\n";
    for (const auto& r : rows)
        out << fmt("%.10g", r.drive_freq) << ',' << fmt("%.4f", r.fundamental) << ','
            << fmt("%.4f", r.band_power) << '\n';
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace emisim
