#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <vector>

#include "sra/channel.hpp"
#include "sra/errors.hpp"
#include "sra/virtualization.hpp"

namespace sra {

/// R_{i+n} for user k: sum_{i != k} p_i b_i b_i^H + sigma_n^2 I.
inline MatrixC interference_plus_noise_cov(const AugmentedManifold& manifold,
                                           const std::vector<double>& powers, double noise_power,
                                           int k) {
    const int K = manifold.user_count();
    if (k < 0 || k >= K) throw invalid_parameter("interference_plus_noise_cov: user index out of range");
    if (static_cast<int>(powers.size()) != K)
        throw invalid_parameter("interference_plus_noise_cov: powers size must equal K");
    MatrixC R = noise_power * MatrixC::Identity(manifold.J, manifold.J);
    for (int i = 0; i < K; ++i)
        if (i != k) R += powers[i] * manifold.B1.col(i) * manifold.B1.col(i).adjoint();
    return R;
}

namespace detail {

/// Solve (R_a) w = (1/scale) p_k b_k. Primary route is a Hermitian
/// positive-definite factorization; singular systems (zero noise) fall back
/// to a rank-revealing solve whose residual is verified.
inline VectorC solve_filter(const MatrixC& R_a, const VectorC& b, double p_k, double scale) {
    Eigen::LLT<MatrixC> llt(R_a);
    VectorC w;
    if (llt.info() == Eigen::Success) {
        w = llt.solve(b);
    } else {
        w = R_a.completeOrthogonalDecomposition().solve(b);
        const double bn = b.norm();
        if (bn > 0 && (R_a * w - b).norm() > 1e-6 * bn)
            throw runtime_failure("mmse_filter: singular design system");
    }
    return (p_k / scale) * w;
}

} // namespace detail

/// w_k = J^{1/4} p_k (R_{i+n} + p_k b_k b_k^H)^{-1} b_k (the J^{1/4} factor
/// generalizes to 1/scale so the physical path uses the same code).
inline VectorC mmse_filter(const AugmentedManifold& manifold, const std::vector<double>& powers,
                           double noise_power, int k) {
    MatrixC R_a = interference_plus_noise_cov(manifold, powers, noise_power, k);
    R_a += powers[k] * manifold.B1.col(k) * manifold.B1.col(k).adjoint();
    return detail::solve_filter(R_a, manifold.B1.col(k), powers[k], manifold.scale);
}

/// One MMSE filter per user, designed from a shared covariance. When a
/// smoothed sample covariance estimate is supplied it replaces the
/// closed-form B1 diag(p) B1^H + sigma_n^2 I design matrix.
struct FilterBank {
    MatrixC W; // J x K
    std::vector<double> powers;
    double noise_power = 0.0;
};

inline MatrixC design_covariance(const AugmentedManifold& manifold, const std::vector<double>& powers,
                                 double noise_power) {
    const Eigen::Map<const Eigen::VectorXd> p(powers.data(), manifold.user_count());
    MatrixC R = noise_power * MatrixC::Identity(manifold.J, manifold.J);
    R.noalias() += manifold.B1 * p.asDiagonal() * manifold.B1.adjoint();
    return R;
}

inline FilterBank design_filters(const AugmentedManifold& manifold, const std::vector<double>& powers,
                                 double noise_power, const MatrixC* covariance_override = nullptr) {
    FilterBank bank;
    bank.powers = powers;
    bank.noise_power = noise_power;
    const MatrixC R_a = covariance_override ? *covariance_override
                                            : design_covariance(manifold, powers, noise_power);
    const int K = manifold.user_count();
    bank.W.resize(manifold.J, K);
    Eigen::LLT<MatrixC> llt(R_a);
    if (llt.info() == Eigen::Success) {
        bank.W = llt.solve(manifold.B1);
        for (int k = 0; k < K; ++k) bank.W.col(k) *= powers[k] / manifold.scale;
    } else {
        for (int k = 0; k < K; ++k)
            bank.W.col(k) = detail::solve_filter(R_a, manifold.B1.col(k), powers[k], manifold.scale);
    }
    return bank;
}

/// Nearest-point hard decision on the QPSK alphabet scaled to the given
/// power; ties break toward the lowest alphabet index.
inline int slice_index(Cplx soft, double power = 1.0) {
    const double amp = std::sqrt(power);
    int best = 0;
    double best_d2 = std::norm(soft - amp * qpsk::alphabet()[0]);
    for (int i = 1; i < 4; ++i) {
        const double d2 = std::norm(soft - amp * qpsk::alphabet()[i]);
        if (d2 < best_d2) {
            best = i;
            best_d2 = d2;
        }
    }
    return best;
}

inline Cplx slice(Cplx soft, double power = 1.0) {
    return std::sqrt(power) * qpsk::alphabet()[slice_index(soft, power)];
}

struct DetectionResult {
    MatrixC soft;            // K x T
    MatrixC hard;            // K x T, entries from the scaled alphabet
    std::vector<int> order;  // OSIC detection order (identity for linear)
};

/// Linear detection with a pre-designed bank: soft = W^H x, hard = slicer.
inline DetectionResult detect_with_bank(const MatrixC& X, const FilterBank& bank) {
    if (X.rows() != bank.W.rows()) throw invalid_parameter("detect_with_bank: snapshot dimension mismatch");
    DetectionResult r;
    r.soft = bank.W.adjoint() * X;
    r.hard.resize(r.soft.rows(), r.soft.cols());
    const int K = static_cast<int>(bank.W.cols());
    for (int k = 0; k < K; ++k)
        for (Eigen::Index t = 0; t < X.cols(); ++t) r.hard(k, t) = slice(r.soft(k, t), bank.powers[k]);
    r.order.resize(K);
    std::iota(r.order.begin(), r.order.end(), 0);
    return r;
}

inline DetectionResult detect_linear(const MatrixC& X, const AugmentedManifold& manifold,
                                     const std::vector<double>& powers, double noise_power,
                                     const MatrixC* covariance_override = nullptr) {
    return detect_with_bank(X, design_filters(manifold, powers, noise_power, covariance_override));
}

/// Norm-ordered successive interference cancellation. Users are taken in
/// decreasing column norm; each stage redesigns the MMSE filter with only
/// the not-yet-cancelled users as interference, slices, and subtracts
/// scale * b_k * s_hat_k from the residual. Cancellation uses hard symbols,
/// so error propagation is modeled.
inline DetectionResult osic_detect(const MatrixC& X, const AugmentedManifold& manifold,
                                   const std::vector<double>& powers, double noise_power,
                                   const MatrixC* covariance_override = nullptr) {
    if (X.rows() != manifold.J) throw invalid_parameter("osic_detect: snapshot dimension mismatch");
    const int K = manifold.user_count();
    const int T = static_cast<int>(X.cols());
    DetectionResult r;
    r.soft.resize(K, T);
    r.hard.resize(K, T);
    r.order.resize(K);
    std::iota(r.order.begin(), r.order.end(), 0);
    std::stable_sort(r.order.begin(), r.order.end(), [&](int a, int b) {
        return manifold.B1.col(a).squaredNorm() > manifold.B1.col(b).squaredNorm();
    });

    MatrixC residual = X;
    MatrixC R_stage = covariance_override ? *covariance_override
                                          : design_covariance(manifold, powers, noise_power);
    for (int stage = 0; stage < K; ++stage) {
        const int k = r.order[stage];
        const VectorC w = detail::solve_filter(R_stage, manifold.B1.col(k), powers[k], manifold.scale);
        for (int t = 0; t < T; ++t) {
            const Cplx soft = w.dot(residual.col(t)); // Eigen dot conjugates the left argument
            r.soft(k, t) = soft;
            r.hard(k, t) = slice(soft, powers[k]);
        }
        residual.noalias() -= manifold.scale * manifold.B1.col(k) * r.hard.row(k);
        // Deflate the design covariance: user k no longer interferes.
        R_stage.noalias() -= powers[k] * manifold.B1.col(k) * manifold.B1.col(k).adjoint();
    }
    return r;
}

} // namespace sra
