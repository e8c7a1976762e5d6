#include "emisim/scenario.hpp"

#include <json.hpp>

#include <fstream>
#include <initializer_list>
#include <optional>

#include "emisim/csv.hpp"

namespace emisim {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& ctx) {
    if (!j.is_object()) throw ConfigParse(ctx + " must be an object");
}

void reject_unknown_keys(const json& obj, const std::string& ctx,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known) throw ConfigParse("unknown key '" + item.key() + "' in " + ctx);
    }
}

double get_number(const json& obj, const std::string& ctx, const char* key,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigParse(ctx + " is missing required key '" + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigParse(ctx + "." + key + " must be a number");
    return v.get<double>();
}

std::string get_string(const json& obj, const std::string& ctx, const char* key,
                       std::optional<std::string> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        throw ConfigParse(ctx + " is missing required key '" + key + "'");
    }
    const json& v = obj.at(key);
    if (!v.is_string()) throw ConfigParse(ctx + "." + key + " must be a string");
    return v.get<std::string>();
}

CircuitParams parse_circuit(const json& j) {
    require_object(j, "circuit");
    reject_unknown_keys(j, "circuit",
                        {"r1_ohm", "r2_ohm", "r_ref_ohm", "c_int_f", "c_off_f", "c_sen_f",
                         "v_rail_v", "edge_time_s"});
    CircuitParams p;
    p.r1 = get_number(j, "circuit", "r1_ohm");
    p.r2 = get_number(j, "circuit", "r2_ohm");
    p.r_ref = get_number(j, "circuit", "r_ref_ohm");
    p.c_int = get_number(j, "circuit", "c_int_f");
    p.c_off = get_number(j, "circuit", "c_off_f");
    p.c_sen = get_number(j, "circuit", "c_sen_f");
    p.v_rail = get_number(j, "circuit", "v_rail_v", 2.5);
    p.edge_time = get_number(j, "circuit", "edge_time_s", 1e-8);
    return p;
}

LisnModel parse_lisn(const json& j) {
    require_object(j, "lisn");
    reject_unknown_keys(j, "lisn",
                        {"line_inductance_h", "measurement_resistance_ohm",
                         "coupling_capacitance_f", "bleed_resistance_ohm"});
    LisnModel m;
    m.line_inductance = get_number(j, "lisn", "line_inductance_h", m.line_inductance);
    m.measurement_resistance =
        get_number(j, "lisn", "measurement_resistance_ohm", m.measurement_resistance);
    m.coupling_capacitance =
        get_number(j, "lisn", "coupling_capacitance_f", m.coupling_capacitance);
    m.bleed_resistance = get_number(j, "lisn", "bleed_resistance_ohm", m.bleed_resistance);
    return m;
}

ReceiverSettings parse_receiver(const json& j) {
    require_object(j, "receiver");
    reject_unknown_keys(j, "receiver",
                        {"f_start_hz", "f_stop_hz", "rbw_hz", "overlap", "detector",
                         "rbw_attenuation_db", "threads"});
    ReceiverSettings s;
    s.f_start = get_number(j, "receiver", "f_start_hz", s.f_start);
    s.f_stop = get_number(j, "receiver", "f_stop_hz", s.f_stop);
    s.rbw = get_number(j, "receiver", "rbw_hz", s.rbw);
    s.overlap = get_number(j, "receiver", "overlap", s.overlap);
    s.rbw_attenuation_db = get_number(j, "receiver", "rbw_attenuation_db", s.rbw_attenuation_db);
    s.threads = static_cast<int>(get_number(j, "receiver", "threads", 0.0));
    const std::string det = get_string(j, "receiver", "detector", "peak");
    if (det == "peak")
        s.detector = Detector::peak;
    else if (det == "average")
        s.detector = Detector::average;
    else
        throw ConfigParse("receiver.detector must be 'peak' or 'average'");
    return s;
}

ElectrodeDrive parse_drive(const json& j) {
    require_object(j, "drive");
    reject_unknown_keys(j, "drive",
                        {"frequency_hz", "v_low_v", "v_high_v", "duty", "rise_s", "fall_s",
                         "c_electrode_f", "field_rejection_db", "preamp_gain_db",
                         "coupling_gain_db", "edge_policy"});
    ElectrodeDrive d;
    d.pulse.frequency = get_number(j, "drive", "frequency_hz");
    d.pulse.v_low = get_number(j, "drive", "v_low_v", 0.0);
    d.pulse.v_high = get_number(j, "drive", "v_high_v", 5.0);
    d.pulse.duty = get_number(j, "drive", "duty", 0.5);
    d.pulse.rise = get_number(j, "drive", "rise_s");
    d.pulse.fall = get_number(j, "drive", "fall_s");
    d.c_electrode = get_number(j, "drive", "c_electrode_f");
    d.field_rejection_db = get_number(j, "drive", "field_rejection_db", 30.0);
    d.preamp_gain_db = get_number(j, "drive", "preamp_gain_db", 38.0);
    d.coupling_gain_db = get_number(j, "drive", "coupling_gain_db", 0.0);
    const std::string policy = get_string(j, "drive", "edge_policy", "scale");
    if (policy == "scale")
        d.edge_policy = EdgePolicy::scale_with_period;
    else if (policy == "fixed")
        d.edge_policy = EdgePolicy::fixed;
    else
        throw ConfigParse("drive.edge_policy must be 'scale' or 'fixed'");
    return d;
}

json circuit_json(const CircuitParams& p) {
    return {{"r1_ohm", p.r1},       {"r2_ohm", p.r2},         {"r_ref_ohm", p.r_ref},
            {"c_int_f", p.c_int},   {"c_off_f", p.c_off},     {"c_sen_f", p.c_sen},
            {"v_rail_v", p.v_rail}, {"edge_time_s", p.edge_time}};
}

json lisn_json(const LisnModel& m) {
    return {{"line_inductance_h", m.line_inductance},
            {"measurement_resistance_ohm", m.measurement_resistance},
            {"coupling_capacitance_f", m.coupling_capacitance},
            {"bleed_resistance_ohm", m.bleed_resistance}};
}

json receiver_json(const ReceiverSettings& s) {
    return {{"f_start_hz", s.f_start},
            {"f_stop_hz", s.f_stop},
            {"rbw_hz", s.rbw},
            {"overlap", s.overlap},
            {"detector", s.detector == Detector::peak ? "peak" : "average"},
            {"rbw_attenuation_db", s.rbw_attenuation_db},
            {"threads", s.threads}};
}

json drive_json(const ElectrodeDrive& d) {
    return {{"frequency_hz", d.pulse.frequency},
            {"v_low_v", d.pulse.v_low},
            {"v_high_v", d.pulse.v_high},
            {"duty", d.pulse.duty},
            {"rise_s", d.pulse.rise},
            {"fall_s", d.pulse.fall},
            {"c_electrode_f", d.c_electrode},
            {"field_rejection_db", d.field_rejection_db},
            {"preamp_gain_db", d.preamp_gain_db},
            {"coupling_gain_db", d.coupling_gain_db},
            {"edge_policy", d.edge_policy == EdgePolicy::scale_with_period ? "scale" : "fixed"}};
}

json timing_json(const TimingSolution& t) {
    return {{"k", t.k},         {"j", t.j},           {"t_on_s", t.t_on},
            {"t_off_s", t.t_off}, {"f_osc_hz", t.f_osc}, {"duty", t.duty}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

json load_json_file(const std::filesystem::path& path, bool artifact) {
    std::ifstream in(path);
    if (!in) {
        if (artifact) throw MissingArtifact("missing file: " + path.string());
        throw ConfigParse("cannot read config file: " + path.string());
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        if (artifact) throw IoError("malformed JSON in " + path.string() + ": " + e.what());
        throw ConfigParse("malformed JSON in " + path.string() + ": " + e.what());
    }
}

}  // namespace

ConductedResult conducted_emission_pipeline(const Scenario& sc) {
    if (!(sc.sample_rate > 2.0 * sc.receiver.f_stop))
        throw InvalidParams("scenario sample_rate must exceed twice the receiver f_stop");
    if (sc.parasitic_cm_capacitance < 0.0)
        throw InvalidParams("parasitic CM capacitance must be >= 0");
    check_lisn(sc.lisn);
    check_settings(sc.receiver);

    ConductedResult res;
    res.timing = timing_from_params(sc.circuit);
    TransientResult tr = simulate_relaxation_transient(sc.circuit, sc.duration, sc.sample_rate);
    res.measured = tr.measured;

    // DM rail current: the integrator supply draw, i.e. c_int * dv_node/dt.
    // That is the +-v_rail/r_ref ramp current plus the injection spikes.
    SampledWaveform i_dm = displacement_current(tr.v_node, sc.circuit.c_int);

    // CM rail current: output swing displaced through the parasitic path.
    SampledWaveform i_cm;
    if (sc.parasitic_cm_capacitance > 0.0) {
        i_cm = displacement_current(tr.v_out, sc.parasitic_cm_capacitance);
    } else {
        i_cm = i_dm;
        i_cm.samples.setZero();
    }

    SampledWaveform i_rail_p = i_cm;
    i_rail_p.samples = i_cm.samples + i_dm.samples;
    SampledWaveform i_rail_n = i_cm;
    i_rail_n.samples = i_cm.samples - i_dm.samples;

    const PortVoltages ports = lisn_response(i_rail_p, i_rail_n, sc.lisn);
    res.spectrum_p = sweep(ports.v_p, sc.receiver);
    res.spectrum_n = sweep(ports.v_n, sc.receiver);
    res.currents.i_cm = std::move(i_cm);
    res.currents.i_dm = std::move(i_dm);
    res.v_out = std::move(tr.v_out);
    res.v_node = std::move(tr.v_node);
    return res;
}

LoadedConfig load_config(const std::filesystem::path& path) {
    const json j = load_json_file(path, /*artifact=*/false);
    require_object(j, "config");

    const auto version = static_cast<int>(get_number(j, "config", "schema_version"));
    if (version != kConfigSchemaVersion)
        throw ConfigParse("unsupported schema_version " + std::to_string(version));

    LoadedConfig cfg;
    cfg.type = get_string(j, "config", "type");
    if (cfg.type == "conducted") {
        reject_unknown_keys(j, "config",
                            {"schema_version", "type", "label", "duration_s", "sample_rate_hz",
                             "circuit", "parasitic_cm_capacitance_f", "lisn", "receiver"});
        Scenario sc;
        sc.label = get_string(j, "config", "label", "");
        sc.duration = get_number(j, "config", "duration_s");
        sc.sample_rate = get_number(j, "config", "sample_rate_hz");
        if (!j.contains("circuit")) throw ConfigParse("config is missing 'circuit'");
        sc.circuit = parse_circuit(j.at("circuit"));
        sc.parasitic_cm_capacitance =
            get_number(j, "config", "parasitic_cm_capacitance_f", sc.parasitic_cm_capacitance);
        if (j.contains("lisn")) sc.lisn = parse_lisn(j.at("lisn"));
        if (j.contains("receiver")) sc.receiver = parse_receiver(j.at("receiver"));
        cfg.conducted = std::move(sc);
    } else if (cfg.type == "nearfield") {
        reject_unknown_keys(j, "config",
                            {"schema_version", "type", "label", "duration_s", "sample_rate_hz",
                             "drive", "frequencies_hz", "receiver"});
        NearfieldScenario ns;
        ns.label = get_string(j, "config", "label", "");
        ns.duration = get_number(j, "config", "duration_s", 0.0);
        ns.sample_rate = get_number(j, "config", "sample_rate_hz", 0.0);
        if (!j.contains("drive")) throw ConfigParse("config is missing 'drive'");
        ns.drive = parse_drive(j.at("drive"));
        if (!j.contains("frequencies_hz") || !j.at("frequencies_hz").is_array() ||
            j.at("frequencies_hz").empty())
            throw ConfigParse("config needs a non-empty 'frequencies_hz' array");
        for (const auto& f : j.at("frequencies_hz")) {
            if (!f.is_number()) throw ConfigParse("frequencies_hz entries must be numbers");
            ns.frequencies.push_back(f.get<double>());
        }
        if (j.contains("receiver")) ns.receiver = parse_receiver(j.at("receiver"));
        cfg.nearfield = std::move(ns);
    } else {
        throw ConfigParse("config type must be 'conducted' or 'nearfield'");
    }
    return cfg;
}

RunOutput run_config(const std::filesystem::path& config_path,
                     const std::filesystem::path& out_dir, bool dump_waveforms) {
    const LoadedConfig cfg = load_config(config_path);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    RunOutput out;
    out.type = cfg.type;
    json manifest;
    manifest["schema_version"] = kConfigSchemaVersion;
    manifest["tool"] = "emisim";
    manifest["tool_version"] = kToolVersion;
    manifest["type"] = cfg.type;

    if (cfg.type == "conducted") {
        const Scenario& sc = cfg.conducted;
        const ConductedResult res = conducted_emission_pipeline(sc);

        write_spectrum_csv(out_dir / "vp_spectrum.csv", res.spectrum_p);
        out.files.push_back("vp_spectrum.csv");
        write_spectrum_csv(out_dir / "vn_spectrum.csv", res.spectrum_n);
        out.files.push_back("vn_spectrum.csv");
        if (dump_waveforms) {
            write_waveform_csv(out_dir / "v_out.csv", res.v_out);
            write_waveform_csv(out_dir / "v_node.csv", res.v_node);
            write_waveform_csv(out_dir / "i_cm.csv", res.currents.i_cm);
            write_waveform_csv(out_dir / "i_dm.csv", res.currents.i_dm);
            out.files.insert(out.files.end(), {"v_out.csv", "v_node.csv", "i_cm.csv", "i_dm.csv"});
        }

        manifest["label"] = sc.label;
        manifest["config"] = {{"duration_s", sc.duration},
                              {"sample_rate_hz", sc.sample_rate},
                              {"parasitic_cm_capacitance_f", sc.parasitic_cm_capacitance},
                              {"circuit", circuit_json(sc.circuit)},
                              {"lisn", lisn_json(sc.lisn)},
                              {"receiver", receiver_json(sc.receiver)}};
        manifest["derived"] = {{"timing", timing_json(res.timing)},
                               {"measured", timing_json(res.measured)},
                               {"samples", res.v_out.size()},
                               {"spectrum_bins", res.spectrum_p.size()}};
    } else {
        const NearfieldScenario& ns = cfg.nearfield;
        const auto rows = frequency_sweep_report(ns.drive, ns.frequencies, ns.receiver,
                                                 ns.duration, ns.sample_rate);
        write_nearfield_csv(out_dir / "nearfield_report.csv", rows);
        out.files.push_back("nearfield_report.csv");

        json points = json::array();
        for (size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            points.push_back({{"drive_freq_hz", r.drive_freq},
                              {"sample_rate_hz", r.sample_rate},
                              {"duration_s", r.duration},
                              {"fundamental_dbuv", r.fundamental},
                              {"fundamental_freq_hz", r.fundamental_freq},
                              {"band_power_dbuv", r.band_power}});
        }
        manifest["label"] = ns.label;
        manifest["config"] = {{"duration_s", ns.duration},
                              {"sample_rate_hz", ns.sample_rate},
                              {"drive", drive_json(ns.drive)},
                              {"frequencies_hz", ns.frequencies},
                              {"receiver", receiver_json(ns.receiver)}};
        manifest["derived"] = {{"points", points}};
    }

    manifest["outputs"] = out.files;
    // dump(2) sorts keys, so reruns serialize identically.
    write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
    out.files.push_back("manifest.json");
    return out;
}

CompareReport compare_emissions(const std::filesystem::path& run_a,
                                const std::filesystem::path& run_b, double f1, double f2) {
    if (!(f1 < f2)) throw InvalidParams("compare band needs f1 < f2");

    struct Loaded {
        Spectrum spec;
        std::string label;
        double f_osc = 0.0;
    };
    const auto load_run = [](const std::filesystem::path& dir) {
        Loaded run;
        const json manifest = load_json_file(dir / "manifest.json", /*artifact=*/true);
        if (manifest.value("type", "") != "conducted")
            throw MissingArtifact(dir.string() + " is not a conducted run");
        run.label = manifest.value("label", "");
        if (run.label.empty()) run.label = dir.filename().string();
        try {
            run.f_osc = manifest.at("derived").at("timing").at("f_osc_hz").get<double>();
        } catch (const json::exception&) {
            throw MissingArtifact(dir.string() + " manifest lacks derived timing");
        }
        run.spec = read_spectrum_csv(dir / "vp_spectrum.csv");
        return run;
    };

    const Loaded a = load_run(run_a);
    const Loaded b = load_run(run_b);

    CompareReport rep;
    rep.label_a = a.label;
    rep.label_b = b.label;
    rep.f1 = f1;
    rep.f2 = f2;
    rep.band_power_a = band_power(a.spec, f1, f2);
    rep.band_power_b = band_power(b.spec, f1, f2);
    rep.delta = rep.band_power_a - rep.band_power_b;
    if (rep.delta > 0.0)
        rep.winner = b.label;  // quieter in the band
    else if (rep.delta < 0.0)
        rep.winner = a.label;
    else
        rep.winner = "tie";

    const auto level_near = [](const Spectrum& s, double f) {
        Eigen::Index nearest = 0;
        (s.freqs - f).abs().minCoeff(&nearest);
        return s.levels[nearest];
    };
    constexpr int kMaxRows = 25;
    for (int n = 1; static_cast<double>(n) * a.f_osc <= f2 && static_cast<int>(rep.harmonics.size()) < kMaxRows; ++n) {
        const double f = static_cast<double>(n) * a.f_osc;
        if (f < f1) continue;
        HarmonicRow row;
        row.harmonic = n;
        row.freq = f;
        row.level_a = level_near(a.spec, f);
        row.level_b = level_near(b.spec, f);
        row.delta = row.level_a - row.level_b;
        rep.harmonics.push_back(row);
    }
    return rep;
}

}  // namespace emisim
