#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sra/channel.hpp"
#include "sra/geometry.hpp"
#include "sra/sweep.hpp"
#include "sra/virtualization.hpp"

namespace sra {

inline constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

inline json geometry_report(const SensorLayout& layout) {
    const auto profile = difference_coarray(layout);
    json j;
    j["kind"] = to_string(layout.kind);
    j["params"] = layout.params;
    j["positions"] = layout.positions;
    j["dof"] = profile.dof;
    j["contiguous_half_extent"] = profile.contiguous_half_extent;
    json wt = json::object();
    for (const auto& [lag, mult] : profile.weight) wt[std::to_string(lag)] = mult;
    j["weight_table"] = wt;
    if (layout.kind == ArrayKind::TLNA || layout.kind == ArrayKind::CPA) {
        if (layout.kind != ArrayKind::TLNA || layout.params[0] == layout.params[1])
            j["virtual_half_extent"] = virtual_half_extent(layout);
    }
    return j;
}

inline json to_json(const ChannelRealization& ch) {
    json j;
    j["angles_deg"] = json::array();
    for (double a : ch.angles) j["angles_deg"].push_back(a * 180.0 / std::numbers::pi);
    j["gains"] = json::array();
    for (const auto& g : ch.gains) j["gains"].push_back({g.real(), g.imag()});
    j["layout"] = geometry_name(ch.layout);
    j["wavelength_ratio"] = ch.wavelength_ratio;
    return j;
}

inline json matrix_to_json(const MatrixC& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

inline json to_json(const SmoothedCovariance& sc) {
    return json{{"J", sc.J}, {"R_ss", matrix_to_json(sc.R_ss)}, {"R_bar", matrix_to_json(sc.R_bar)}};
}

inline json to_json(const AugmentedManifold& m) {
    return json{{"J", m.J}, {"scale", m.scale}, {"B1", matrix_to_json(m.B1)}};
}

// ---- SimConfig <-> JSON -------------------------------------------------

inline json to_json(const SimConfig& cfg) {
    json j;
    j["arrays"] = cfg.arrays;
    j["users"] = cfg.users;
    j["snapshots"] = cfg.snapshots;
    j["trials"] = cfg.trials;
    j["snr_grid_db"] = cfg.snr_grid_db;
    if (!cfg.powers.empty()) j["powers"] = cfg.powers;
    if (cfg.angle_policy.kind == AnglePolicy::Kind::FixedGrid) {
        j["angle_policy"] = {{"type", "grid"},
                             {"span_deg", cfg.angle_policy.grid_span_rad * 180.0 / std::numbers::pi}};
    } else {
        j["angle_policy"] = {
            {"type", "uniform"},
            {"min_separation_deg", cfg.angle_policy.min_separation_rad * 180.0 / std::numbers::pi}};
    }
    j["dedup_mode"] = cfg.dedup_mode == DedupMode::Average ? "average" : "first";
    j["covariance_mode"] = cfg.covariance_mode == CovarianceMode::Exact ? "exact" : "sample";
    j["seed"] = cfg.seed;
    return j;
}

inline SimConfig config_from_json(const json& j) {
    SimConfig cfg;
    try {
        if (j.contains("arrays")) cfg.arrays = j.at("arrays").get<std::vector<std::string>>();
        if (j.contains("users")) cfg.users = j.at("users").get<int>();
        if (j.contains("snapshots")) cfg.snapshots = j.at("snapshots").get<int>();
        if (j.contains("trials")) cfg.trials = j.at("trials").get<int>();
        if (j.contains("snr_grid_db")) cfg.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
        if (j.contains("powers")) cfg.powers = j.at("powers").get<std::vector<double>>();
        if (j.contains("angle_policy")) {
            const auto& ap = j.at("angle_policy");
            const std::string type = ap.value("type", "uniform");
            if (type == "grid")
                cfg.angle_policy = AnglePolicy::grid(ap.value("span_deg", 120.0));
            else if (type == "uniform")
                cfg.angle_policy = AnglePolicy::uniform(ap.value("min_separation_deg", 5.0));
            else
                throw invalid_parameter("config field 'angle_policy.type': unknown value '" + type + "'");
        }
        if (j.contains("dedup_mode")) {
            const std::string m = j.at("dedup_mode").get<std::string>();
            if (m == "average") cfg.dedup_mode = DedupMode::Average;
            else if (m == "first") cfg.dedup_mode = DedupMode::FirstOccurrence;
            else throw invalid_parameter("config field 'dedup_mode': expected 'average' or 'first'");
        }
        if (j.contains("covariance_mode")) {
            const std::string m = j.at("covariance_mode").get<std::string>();
            if (m == "exact") cfg.covariance_mode = CovarianceMode::Exact;
            else if (m == "sample") cfg.covariance_mode = CovarianceMode::Sample;
            else throw invalid_parameter("config field 'covariance_mode': expected 'exact' or 'sample'");
        }
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw invalid_parameter(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_parameter("config file not found: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw invalid_parameter("config parse error in " + path + ": " + e.what());
    }
    return config_from_json(j);
}

// ---- Result persistence --------------------------------------------------

/// FNV-1a over the canonical (sorted-key, no-whitespace) config JSON.
inline std::string config_digest(const SimConfig& cfg) {
    const std::string canon = to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline std::string sweep_csv(const SweepResult& res) {
    std::ostringstream os;
    os << "snr_db,asr_mean,asr_se,ber_mmse_mean,ber_mmse_se,ber_osic_mean,ber_osic_se,trials\n";
    for (const auto& p : res.points) {
        os << format_double(p.snr_db) << ',' << format_double(p.asr_mean) << ','
           << format_double(p.asr_se) << ',' << format_double(p.ber_mmse_mean) << ','
           << format_double(p.ber_mmse_se) << ',' << format_double(p.ber_osic_mean) << ','
           << format_double(p.ber_osic_se) << ',' << p.trials << '\n';
    }
    return os.str();
}

/// gnuplot-friendly: same columns, whitespace-delimited, '#' header.
inline std::string sweep_dat(const SweepResult& res) {
    std::ostringstream os;
    os << "# snr_db asr_mean asr_se ber_mmse_mean ber_mmse_se ber_osic_mean ber_osic_se trials\n";
    for (const auto& p : res.points) {
        os << format_double(p.snr_db) << ' ' << format_double(p.asr_mean) << ' '
           << format_double(p.asr_se) << ' ' << format_double(p.ber_mmse_mean) << ' '
           << format_double(p.ber_mmse_se) << ' ' << format_double(p.ber_osic_mean) << ' '
           << format_double(p.ber_osic_se) << ' ' << p.trials << '\n';
    }
    return os.str();
}

inline json to_json(const SweepResult& res, const SimConfig& cfg) {
    json pts = json::array();
    for (const auto& p : res.points) {
        pts.push_back({{"snr_db", p.snr_db},
                       {"asr_mean", p.asr_mean},
                       {"asr_se", p.asr_se},
                       {"ber_mmse_mean", p.ber_mmse_mean},
                       {"ber_mmse_se", p.ber_mmse_se},
                       {"ber_osic_mean", p.ber_osic_mean},
                       {"ber_osic_se", p.ber_osic_se},
                       {"trials", p.trials}});
    }
    return json{{"array", res.array}, {"points", pts}, {"config", to_json(cfg)},
                {"config_digest", config_digest(cfg)}, {"version", kVersion}};
}

inline SweepResult sweep_from_json(const json& j) {
    SweepResult res;
    res.array = j.at("array").get<std::string>();
    for (const auto& p : j.at("points")) {
        SnrPointStats st;
        st.snr_db = p.at("snr_db").get<double>();
        st.asr_mean = p.at("asr_mean").get<double>();
        st.asr_se = p.at("asr_se").get<double>();
        st.ber_mmse_mean = p.at("ber_mmse_mean").get<double>();
        st.ber_mmse_se = p.at("ber_mmse_se").get<double>();
        st.ber_osic_mean = p.at("ber_osic_mean").get<double>();
        st.ber_osic_se = p.at("ber_osic_se").get<double>();
        st.trials = p.at("trials").get<int>();
        res.points.push_back(st);
    }
    return res;
}

inline std::string sanitize_filename(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == ':' || c == ',' || c == '/') c = '_';
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw runtime_failure("cannot write " + path);
    out << content;
}

} // namespace sra
