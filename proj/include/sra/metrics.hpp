#pragma once

#include <chrono>
#include <cmath>
#include <vector>

#include "sra/receivers.hpp"
#include "sra/virtualization.hpp"

namespace sra {

/// Output SINR of filter w for user k:
/// p_k |w^H b_k|^2 / (sum_{i != k} p_i |w^H b_i|^2 + sigma_n^2 ||w||^2).
inline double sinr(const VectorC& w, const AugmentedManifold& manifold,
                   const std::vector<double>& powers, double noise_power, int k) {
    const int K = manifold.user_count();
    if (k < 0 || k >= K) throw invalid_parameter("sinr: user index out of range");
    const double signal = powers[k] * std::norm(w.dot(manifold.B1.col(k)));
    double denom = noise_power * w.squaredNorm();
    for (int i = 0; i < K; ++i)
        if (i != k) denom += powers[i] * std::norm(w.dot(manifold.B1.col(i)));
    if (denom <= 0) throw invalid_parameter("sinr: zero filter with zero noise");
    return signal / denom;
}

/// ASR = sum_k log2(1 + SINR_k), evaluated at the designed filters.
inline double achievable_sum_rate(const FilterBank& bank, const AugmentedManifold& manifold,
                                  const std::vector<double>& powers, double noise_power) {
    double asr = 0.0;
    for (int k = 0; k < manifold.user_count(); ++k)
        asr += std::log2(1.0 + sinr(bank.W.col(k), manifold, powers, noise_power, k));
    return asr;
}

/// Uncoded BER with Gray-mapped QPSK: a bit error per sign disagreement in
/// each of the I and Q rails.
inline double bit_error_rate(const MatrixC& hard, const MatrixC& truth) {
    if (hard.rows() != truth.rows() || hard.cols() != truth.cols())
        throw invalid_parameter("bit_error_rate: dimension mismatch");
    long errors = 0;
    for (Eigen::Index j = 0; j < hard.cols(); ++j) {
        for (Eigen::Index i = 0; i < hard.rows(); ++i) {
            if ((hard(i, j).real() < 0) != (truth(i, j).real() < 0)) ++errors;
            if ((hard(i, j).imag() < 0) != (truth(i, j).imag() < 0)) ++errors;
        }
    }
    return static_cast<double>(errors) / (2.0 * hard.size());
}

struct ComplexityReport {
    int J = 0;
    double dominant_flops = 0.0;       // J^3 / 3: Cholesky factorization of the design matrix
    double measured_seconds = 0.0;     // wall time per filter design, averaged
    int measured_designs = 0;
};

/// Dominant-term operation count plus a wall-time measurement of the filter
/// design (covariance assembly + Hermitian solve) at dimension J.
inline ComplexityReport complexity_report(int J, int repeats = 50) {
    if (J < 1) throw invalid_parameter("complexity_report: J must be >= 1");
    ComplexityReport rep;
    rep.J = J;
    rep.dominant_flops = static_cast<double>(J) * J * J / 3.0;

    Rng rng = make_rng(derive_seed(0xC0FFEE, J));
    const int K = std::max(1, std::min(8, J - 1));
    ChannelRealization ch;
    ch.angles.resize(K);
    ch.gains.resize(K);
    AnglePolicy grid = AnglePolicy::grid();
    auto angles = draw_angles(rng, K, grid);
    for (int k = 0; k < K; ++k) {
        ch.angles[k] = angles[k];
        ch.gains[k] = complex_gaussian(rng);
    }
    AugmentedManifold m;
    m.J = J;
    m.scale = std::pow(static_cast<double>(J), -0.25);
    m.B1.resize(J, K);
    for (int k = 0; k < K; ++k) {
        const double amp = std::abs(ch.gains[k]);
        const double phase = -2.0 * std::numbers::pi * kDefaultWavelengthRatio * std::sin(ch.angles[k]);
        for (int l = 0; l < J; ++l) m.B1(l, k) = amp * std::polar(1.0, phase * l);
    }
    const std::vector<double> powers(K, 1.0);

    volatile double sink = 0.0; // defeat dead-code elimination
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) {
        const FilterBank bank = design_filters(m, powers, 0.1);
        sink = sink + bank.W(0, 0).real();
    }
    const auto t1 = std::chrono::steady_clock::now();
    rep.measured_designs = repeats;
    rep.measured_seconds = std::chrono::duration<double>(t1 - t0).count() / repeats;
    return rep;
}

} // namespace sra
