// Command-line front end: geometry inspection, Monte Carlo SNR sweeps and
// pairwise comparison of persisted sweep results.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "sra/io.hpp"
#include "sra/sweep.hpp"

namespace fs = std::filesystem;
using sra::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::vector<double> parse_snr_range(const std::string& s) {
    // "start:step:stop"
    double start = 0, step = 0, stop = 0;
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' || step <= 0)
        throw sra::invalid_parameter("--snr expects start:step:stop with step > 0");
    std::vector<double> grid;
    for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
    return grid;
}

int cmd_geometry(const std::string& spec, const std::optional<std::string>& out_path) {
    const auto layout = sra::parse_geometry(spec);
    const json report = sra::geometry_report(layout);
    std::cout << report.dump(2) << '\n';
    if (out_path) sra::write_file(*out_path, report.dump(2) + "\n");
    return kExitOk;
}

int cmd_sweep(const sra::SimConfig& cfg, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto t0 = std::chrono::system_clock::now();
    const auto results = sra::run_campaign(cfg);

    json manifest;
    manifest["config"] = sra::to_json(cfg);
    manifest["config_digest"] = sra::config_digest(cfg);
    manifest["seed"] = cfg.seed;
    manifest["version"] = sra::kVersion;
    manifest["timestamp_utc"] =
        std::chrono::duration_cast<std::chrono::seconds>(t0.time_since_epoch()).count();
    json outputs = json::array();

    for (const auto& res : results) {
        const std::string base = (fs::path(out_dir) / sra::sanitize_filename(res.array)).string();
        sra::write_file(base + ".csv", sra::sweep_csv(res));
        sra::write_file(base + ".dat", sra::sweep_dat(res));
        sra::write_file(base + ".json", sra::to_json(res, cfg).dump(2) + "\n");
        outputs.push_back(base + ".csv");
        std::cout << res.array << ": wrote " << base << ".{csv,dat,json}\n";
    }
    manifest["outputs"] = outputs;
    sra::write_file((fs::path(out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    return kExitOk;
}

int cmd_compare(const std::vector<std::string>& paths, const std::optional<std::string>& expect_path) {
    std::vector<sra::SweepResult> results;
    for (const auto& p : paths) {
        std::ifstream in(p);
        if (!in) throw sra::invalid_parameter("result file not found: " + p);
        json j;
        in >> j;
        results.push_back(sra::sweep_from_json(j));
    }
    const auto& grid = results.front().points;
    for (const auto& r : results) {
        if (r.points.size() != grid.size())
            throw sra::invalid_parameter("mismatched SNR grids across result files");
        for (std::size_t i = 0; i < grid.size(); ++i)
            if (r.points[i].snr_db != grid[i].snr_db)
                throw sra::invalid_parameter("mismatched SNR grids across result files");
    }

    // Optional expectation file: [{"metric": "asr"|"ber_osic"|"ber_mmse",
    //   "better": "<arrayA>", "than": "<arrayB>"}]
    json expectations = json::array();
    if (expect_path) {
        std::ifstream in(*expect_path);
        if (!in) throw sra::invalid_parameter("expectation file not found: " + *expect_path);
        in >> expectations;
    }

    auto find = [&](const std::string& name) -> const sra::SweepResult* {
        for (const auto& r : results)
            if (r.array == name) return &r;
        return nullptr;
    };

    int violations = 0;
    for (std::size_t a = 0; a < results.size(); ++a) {
        for (std::size_t b = a + 1; b < results.size(); ++b) {
            const auto& ra = results[a];
            const auto& rb = results[b];
            std::cout << "\n== " << ra.array << " vs " << rb.array << " ==\n";
            std::cout << "snr_db  d_asr (se)        d_ber_mmse (se)   d_ber_osic (se)\n";
            bool asr_dominates = true;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const auto& pa = ra.points[i];
                const auto& pb = rb.points[i];
                const double da = pa.asr_mean - pb.asr_mean;
                const double sa = std::sqrt(pa.asr_se * pa.asr_se + pb.asr_se * pb.asr_se);
                const double dm = pa.ber_mmse_mean - pb.ber_mmse_mean;
                const double sm =
                    std::sqrt(pa.ber_mmse_se * pa.ber_mmse_se + pb.ber_mmse_se * pb.ber_mmse_se);
                const double d_osic = pa.ber_osic_mean - pb.ber_osic_mean;
                const double so =
                    std::sqrt(pa.ber_osic_se * pa.ber_osic_se + pb.ber_osic_se * pb.ber_osic_se);
                if (da <= 0) asr_dominates = false;
                std::cout << std::setw(6) << pa.snr_db << "  " << std::setw(9) << std::setprecision(4)
                          << da << " (" << sa << ")  " << dm << " (" << sm << ")  " << d_osic << " (" << so
                          << ")\n";
            }
            std::cout << ra.array << " ASR dominates " << rb.array
                      << " at all points: " << (asr_dominates ? "yes" : "no") << '\n';
        }
    }

    for (const auto& e : expectations) {
        const std::string metric = e.at("metric").get<std::string>();
        const auto* better = find(e.at("better").get<std::string>());
        const auto* worse = find(e.at("than").get<std::string>());
        if (!better || !worse) throw sra::invalid_parameter("expectation references unknown array");
        bool ok = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto& pb = better->points[i];
            const auto& pw = worse->points[i];
            double vb = 0, vw = 0;
            if (metric == "asr") { vb = -pb.asr_mean; vw = -pw.asr_mean; }
            else if (metric == "ber_mmse") { vb = pb.ber_mmse_mean; vw = pw.ber_mmse_mean; }
            else if (metric == "ber_osic") { vb = pb.ber_osic_mean; vw = pw.ber_osic_mean; }
            else throw sra::invalid_parameter("expectation metric must be asr|ber_mmse|ber_osic");
            if (vb > vw) ok = false;
        }
        std::cout << "expectation " << better->array << " beats " << worse->array << " on " << metric
                  << ": " << (ok ? "holds" : "VIOLATED") << '\n';
        if (!ok) ++violations;
    }
    return violations == 0 ? kExitOk : kExitRuntime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-array multiuser uplink simulator"};
    app.require_subcommand(1);

    auto* geo = app.add_subcommand("geometry", "Inspect an array geometry");
    std::string geo_spec;
    std::optional<std::string> geo_out;
    geo->add_option("spec", geo_spec, "Geometry spec, e.g. tlna:4,4 | cpa:5,2 | ula:16")->required();
    geo->add_option("--out", geo_out, "Also write the JSON report to this file");

    auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo SNR sweep");
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed_override;
    std::optional<int> trials_override;
    std::optional<std::string> snr_override, geometry_override, mode_override;
    sweep->add_option("--config", config_path, "JSON config file")->required();
    sweep->add_option("--out", out_dir, "Output directory");
    sweep->add_option("--seed", seed_override, "Override the config seed");
    sweep->add_option("--trials", trials_override, "Override the trial count");
    sweep->add_option("--snr", snr_override, "Override the SNR grid as start:step:stop");
    sweep->add_option("--geometry", geometry_override, "Run only this geometry spec");
    sweep->add_option("--mode", mode_override, "Covariance mode: exact | sample");

    auto* compare = app.add_subcommand("compare", "Compare two or more sweep result JSON files");
    std::vector<std::string> result_paths;
    std::optional<std::string> expect_path;
    compare->add_option("results", result_paths, "SweepResult .json files")->expected(2, -1);
    compare->add_option("--expect", expect_path, "Expected-ordering JSON file");

    try {
        app.parse(argc, argv);
        if (*geo) return cmd_geometry(geo_spec, geo_out);
        if (*sweep) {
            sra::SimConfig cfg = sra::load_config(config_path);
            if (seed_override) cfg.seed = *seed_override;
            if (trials_override) cfg.trials = *trials_override;
            if (snr_override) cfg.snr_grid_db = parse_snr_range(*snr_override);
            if (geometry_override) cfg.arrays = {*geometry_override};
            if (mode_override) {
                if (*mode_override == "exact") cfg.covariance_mode = sra::CovarianceMode::Exact;
                else if (*mode_override == "sample") cfg.covariance_mode = sra::CovarianceMode::Sample;
                else throw sra::invalid_parameter("--mode expects exact or sample");
            }
            cfg.validate();
            return cmd_sweep(cfg, out_dir);
        }
        if (*compare) return cmd_compare(result_paths, expect_path);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    } catch (const sra::invalid_parameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
