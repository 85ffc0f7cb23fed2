#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <string>
#include <thread>
#include <vector>

#include "sra/channel.hpp"
#include "sra/geometry.hpp"
#include "sra/metrics.hpp"
#include "sra/receivers.hpp"
#include "sra/rng.hpp"
#include "sra/virtualization.hpp"

namespace sra {

enum class CovarianceMode { Exact, Sample };

/// One Monte Carlo experiment: geometry list, user count, SNR grid and the
/// knobs of the trial pipeline. SNR (dB) = 10 log10(symbol_power / sigma_n^2)
/// with unit symbol power; sweeps vary sigma_n^2.
struct SimConfig {
    std::vector<std::string> arrays = {"tlna:4,4", "cpa:5,2", "ula:16"};
    int users = 8;
    int snapshots = 100;
    int trials = 1000;
    std::vector<double> snr_grid_db = {0, 5, 10, 15, 20};
    std::vector<double> powers; // empty -> all ones
    AnglePolicy angle_policy = AnglePolicy::uniform();
    DedupMode dedup_mode = DedupMode::Average;
    CovarianceMode covariance_mode = CovarianceMode::Exact;
    std::uint64_t seed = 1;
    int workers = 0; // 0 -> SRA_WORKERS env or hardware_concurrency

    std::vector<double> effective_powers() const {
        return powers.empty() ? std::vector<double>(users, 1.0) : powers;
    }

    void validate() const {
        if (users < 1) throw invalid_parameter("config: users must be >= 1");
        if (snapshots < 1) throw invalid_parameter("config: snapshots must be >= 1");
        if (trials < 1) throw invalid_parameter("config: trials must be >= 1");
        if (snr_grid_db.empty()) throw invalid_parameter("config: snr grid must be nonempty");
        if (arrays.empty()) throw invalid_parameter("config: need at least one array");
        if (!powers.empty() && static_cast<int>(powers.size()) != users)
            throw invalid_parameter("config: powers must have one entry per user");
        for (const auto& a : arrays) (void)parse_geometry(a); // surface parse errors up front
    }
};

struct TrialMetrics {
    double asr = 0.0;
    double ber_mmse = 0.0;
    double ber_osic = 0.0;
};

struct SnrPointStats {
    double snr_db = 0.0;
    double asr_mean = 0.0, asr_se = 0.0;
    double ber_mmse_mean = 0.0, ber_mmse_se = 0.0;
    double ber_osic_mean = 0.0, ber_osic_se = 0.0;
    int trials = 0;
};

struct SweepResult {
    std::string array;
    std::vector<SnrPointStats> points;
};

namespace detail {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SRA_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

struct PreparedArray {
    SensorLayout layout;
    bool virtualized = false;
    int J = 0; // virtual extent, or M for the physical path
};

inline PreparedArray prepare_array(const std::string& spec, int users) {
    PreparedArray pa;
    pa.layout = parse_geometry(spec);
    pa.virtualized = pa.layout.kind == ArrayKind::TLNA || pa.layout.kind == ArrayKind::CPA;
    pa.J = pa.virtualized ? virtual_half_extent(pa.layout) : pa.layout.sensor_count();
    if (users > pa.J)
        throw invalid_parameter("config: " + spec + " supports at most " + std::to_string(pa.J) +
                                " users (K = " + std::to_string(users) + ")");
    return pa;
}

} // namespace detail

/// Run one (array, SNR point). Sub-seeds: channel and symbol draws depend
/// only on (seed, snr index, trial) so paired-seed comparisons across array
/// types share the same channels; noise additionally keys on the array.
inline TrialMetrics run_trial(const SimConfig& cfg, const detail::PreparedArray& pa, int array_index,
                              int snr_index, int trial) {
    const double noise_power = std::pow(10.0, -cfg.snr_grid_db[snr_index] / 10.0);
    const auto powers = cfg.effective_powers();

    Rng channel_rng = make_rng(derive_seed(cfg.seed, snr_index, trial, 0));
    Rng symbol_rng = make_rng(derive_seed(cfg.seed, snr_index, trial, 1));
    Rng noise_rng = make_rng(derive_seed(cfg.seed, snr_index, trial, 100 + array_index));

    const ChannelRealization ch = draw_channel(channel_rng, pa.layout, cfg.users, cfg.angle_policy);
    const MatrixC S = generate_symbols(symbol_rng, cfg.users, cfg.snapshots, powers);

    const AugmentedManifold manifold =
        pa.virtualized ? augmented_manifold(ch, pa.J) : physical_manifold(ch);

    // Design covariance: closed form in exact mode; estimated from T physical
    // snapshots (virtualized and smoothed for sparse arrays) in sample mode.
    MatrixC design_cov;
    bool have_override = false;
    MatrixC X_detect;
    if (cfg.covariance_mode == CovarianceMode::Sample) {
        const SnapshotBlock blk = received_block(ch, S, noise_power, noise_rng);
        const MatrixC R_hat = sample_covariance(blk.X);
        if (pa.virtualized) {
            const auto vs = deduplicate_and_sort(vectorize_covariance(R_hat), pa.layout, cfg.dedup_mode);
            const auto sc = spatial_smoothing(vs);
            design_cov = std::sqrt(static_cast<double>(pa.J)) * sc.R_bar;
            X_detect = synthesize_augmented_snapshots(manifold, S, noise_power, noise_rng);
        } else {
            design_cov = R_hat;
            X_detect = blk.X;
        }
        have_override = true;
    } else {
        if (pa.virtualized) {
            X_detect = synthesize_augmented_snapshots(manifold, S, noise_power, noise_rng);
        } else {
            X_detect = received_block(ch, S, noise_power, noise_rng).X;
        }
    }

    const MatrixC* cov = have_override ? &design_cov : nullptr;
    const FilterBank bank = design_filters(manifold, powers, noise_power, cov);

    TrialMetrics m;
    m.asr = achievable_sum_rate(bank, manifold, powers, noise_power);
    m.ber_mmse = bit_error_rate(detect_with_bank(X_detect, bank).hard, S);
    m.ber_osic = bit_error_rate(osic_detect(X_detect, manifold, powers, noise_power, cov).hard, S);
    return m;
}

/// Per-trial metrics for one array at one SNR point, parallel over trials.
/// Output is indexed by trial and independent of the worker count.
inline std::vector<TrialMetrics> run_point(const SimConfig& cfg, int array_index, int snr_index) {
    const auto pa = detail::prepare_array(cfg.arrays[array_index], cfg.users);
    std::vector<TrialMetrics> out(cfg.trials);
    const int workers = std::min(detail::resolve_workers(cfg.workers), cfg.trials);
    if (workers <= 1) {
        for (int t = 0; t < cfg.trials; ++t) out[t] = run_trial(cfg, pa, array_index, snr_index, t);
        return out;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int t = next.fetch_add(1); t < cfg.trials; t = next.fetch_add(1))
                out[t] = run_trial(cfg, pa, array_index, snr_index, t);
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

namespace detail {

inline void accumulate(SnrPointStats& st, const std::vector<TrialMetrics>& trials,
                       double snr_db) {
    st.snr_db = snr_db;
    st.trials = static_cast<int>(trials.size());
    const double n = static_cast<double>(st.trials);
    double asr = 0, bm = 0, bo = 0;
    for (const auto& t : trials) { // fixed trial order: bit-reproducible sums
        asr += t.asr;
        bm += t.ber_mmse;
        bo += t.ber_osic;
    }
    st.asr_mean = asr / n;
    st.ber_mmse_mean = bm / n;
    st.ber_osic_mean = bo / n;
    double va = 0, vm = 0, vo = 0;
    for (const auto& t : trials) {
        va += (t.asr - st.asr_mean) * (t.asr - st.asr_mean);
        vm += (t.ber_mmse - st.ber_mmse_mean) * (t.ber_mmse - st.ber_mmse_mean);
        vo += (t.ber_osic - st.ber_osic_mean) * (t.ber_osic - st.ber_osic_mean);
    }
    const double denom = n > 1 ? n * (n - 1) : n;
    st.asr_se = std::sqrt(va / denom);
    st.ber_mmse_se = std::sqrt(vm / denom);
    st.ber_osic_se = std::sqrt(vo / denom);
}

} // namespace detail

inline SweepResult run_sweep(const SimConfig& cfg, int array_index) {
    cfg.validate();
    SweepResult res;
    res.array = cfg.arrays[array_index];
    res.points.resize(cfg.snr_grid_db.size());
    for (std::size_t s = 0; s < cfg.snr_grid_db.size(); ++s) {
        const auto trials = run_point(cfg, array_index, static_cast<int>(s));
        detail::accumulate(res.points[s], trials, cfg.snr_grid_db[s]);
    }
    return res;
}

/// All arrays of the config, sharing paired per-trial channel seeds.
inline std::vector<SweepResult> run_campaign(const SimConfig& cfg) {
    cfg.validate();
    std::vector<SweepResult> all;
    all.reserve(cfg.arrays.size());
    for (std::size_t a = 0; a < cfg.arrays.size(); ++a)
        all.push_back(run_sweep(cfg, static_cast<int>(a)));
    return all;
}

} // namespace sra
