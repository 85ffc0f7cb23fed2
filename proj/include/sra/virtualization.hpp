#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <utility>
#include <vector>

#include "sra/channel.hpp"
#include "sra/errors.hpp"
#include "sra/geometry.hpp"

namespace sra {

/// R_x = sum_k p_k h_k h_k^H + sigma_n^2 I.
inline MatrixC exact_covariance(const ChannelRealization& channel, const std::vector<double>& powers,
                                double noise_power) {
    if (static_cast<int>(powers.size()) != channel.user_count())
        throw invalid_parameter("exact_covariance: powers size must equal K");
    const int M = channel.layout.sensor_count();
    MatrixC R = noise_power * MatrixC::Identity(M, M);
    for (int k = 0; k < channel.user_count(); ++k)
        R += powers[k] * channel.H.col(k) * channel.H.col(k).adjoint();
    return R;
}

/// (1/T) X X^H.
inline MatrixC sample_covariance(const MatrixC& X) {
    if (X.cols() < 1) throw invalid_parameter("sample_covariance: need at least one snapshot");
    return (X * X.adjoint()) / static_cast<double>(X.cols());
}

/// Column-major stacking vec(R).
inline VectorC vectorize_covariance(const MatrixC& R) {
    if (R.rows() != R.cols()) throw invalid_parameter("vectorize_covariance: input must be square");
    return Eigen::Map<const VectorC>(R.data(), R.size());
}

/// For each lag in [-(J-1), J-1], the covariance index pairs (i, j)
/// with position[i] - position[j] = lag, in column-major scan order of vec(R).
struct LagSelectionMap {
    int J = 0;
    std::vector<std::vector<std::pair<int, int>>> pairs; // index 0 <-> lag -(J-1)

    const std::vector<std::pair<int, int>>& at_lag(int lag) const { return pairs[lag + J - 1]; }
};

inline LagSelectionMap build_lag_selection(const SensorLayout& layout, int J) {
    LagSelectionMap map;
    map.J = J;
    map.pairs.assign(2 * J - 1, {});
    const int M = layout.sensor_count();
    for (int j = 0; j < M; ++j) { // column-major: column index j outer
        for (int i = 0; i < M; ++i) {
            const int lag = layout.positions[i] - layout.positions[j];
            if (lag >= -(J - 1) && lag <= J - 1) map.pairs[lag + J - 1].emplace_back(i, j);
        }
    }
    for (int l = 0; l < 2 * J - 1; ++l)
        if (map.pairs[l].empty())
            throw internal_consistency_error("build_lag_selection: lag " + std::to_string(l - (J - 1)) +
                                             " has no contributing sensor pair");
    return map;
}

enum class DedupMode { FirstOccurrence, Average };

/// Lag-sorted virtual snapshot, entries at lags -(J-1) .. (J-1).
struct VirtualSnapshot {
    VectorC v;
    int J = 0;

    Cplx at_lag(int lag) const { return v[lag + J - 1]; }
};

/// Collapse vec(R_x) onto the contiguous lag segment. Average mode takes the
/// multiplicity-weighted mean per lag; first-occurrence keeps the first entry
/// in column-major scan order. Both coincide on an exact covariance.
inline VirtualSnapshot deduplicate_and_sort(const VectorC& v, const SensorLayout& layout,
                                            DedupMode mode = DedupMode::Average) {
    const int M = layout.sensor_count();
    if (v.size() != static_cast<Eigen::Index>(M) * M)
        throw invalid_parameter("deduplicate_and_sort: vector length must be M^2");
    const int J = virtual_half_extent(layout);
    const auto map = build_lag_selection(layout, J);
    VirtualSnapshot out;
    out.J = J;
    out.v.resize(2 * J - 1);
    for (int l = 0; l < 2 * J - 1; ++l) {
        const auto& prs = map.pairs[l];
        if (mode == DedupMode::FirstOccurrence) {
            auto best = prs.front();
            for (const auto& pr : prs)
                if (pr.second * M + pr.first < best.second * M + best.first) best = pr;
            out.v[l] = v[best.second * M + best.first];
        } else {
            Cplx acc = 0;
            for (const auto& [i, j] : prs) acc += v[j * M + i];
            out.v[l] = acc / static_cast<double>(prs.size());
        }
    }
    return out;
}

/// q(theta): entry |g|^2 exp(-j 2 pi (d/lambda) l sin(theta)) at lag l.
inline VectorC augmented_steering(double theta, Cplx gain, int J,
                                  double d_over_lambda = kDefaultWavelengthRatio) {
    constexpr double half_pi = std::numbers::pi / 2;
    if (!(theta >= -half_pi && theta <= half_pi))
        throw invalid_parameter("augmented_steering: angle outside [-pi/2, pi/2]");
    if (J < 1) throw invalid_parameter("augmented_steering: J must be >= 1");
    const double g2 = std::norm(gain);
    const double phase_per_lag = -2.0 * std::numbers::pi * d_over_lambda * std::sin(theta);
    VectorC q(2 * J - 1);
    for (int l = -(J - 1); l <= J - 1; ++l) q[l + J - 1] = g2 * std::polar(1.0, phase_per_lag * l);
    return q;
}

/// J x J smoothed covariance and its Hermitian PSD square root.
struct SmoothedCovariance {
    MatrixC R_ss;
    MatrixC R_bar;
    int J = 0;
};

/// Hermitian PSD square root via eigendecomposition; negative eigenvalues
/// (sample-covariance jitter) are clamped to zero.
inline MatrixC hermitian_sqrt(const MatrixC& A) {
    Eigen::SelfAdjointEigenSolver<MatrixC> es(A);
    if (es.info() != Eigen::Success) throw runtime_failure("hermitian_sqrt: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam[i] = lam[i] > 0 ? std::sqrt(lam[i]) : 0.0;
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

/// R_ss = (1/J) sum_{i=1}^{J} w_i w_i^H where w_i spans rows (J+1-i)..(2J-i)
/// of the lag-sorted snapshot (1-based).
inline SmoothedCovariance spatial_smoothing(const VirtualSnapshot& vs) {
    const int J = vs.J;
    if (vs.v.size() != 2 * J - 1) throw invalid_parameter("spatial_smoothing: wrong snapshot length");
    SmoothedCovariance sc;
    sc.J = J;
    sc.R_ss = MatrixC::Zero(J, J);
    for (int i = 1; i <= J; ++i) {
        const auto w = vs.v.segment(J - i, J);
        sc.R_ss += w * w.adjoint();
    }
    sc.R_ss /= static_cast<double>(J);
    sc.R_ss = 0.5 * (sc.R_ss + sc.R_ss.adjoint().eval()); // round-off symmetrization
    sc.R_bar = hermitian_sqrt(sc.R_ss);
    return sc;
}

/// Effective channel of the equivalent virtual (or physical) system:
/// x(t) = scale * (B1 s(t) + z(t)).
struct AugmentedManifold {
    MatrixC B1;   // J x K
    double scale; // J^(-1/4) for virtual arrays, 1 for physical arrays
    int J = 0;

    int user_count() const { return static_cast<int>(B1.cols()); }
};

/// Augmented manifold over lags 0..J-1. Column k carries amplitude |g_k|, the
/// unique per-column scaling for which B1 diag(p) B1^H + sigma_n^2 I equals
/// the Toeplitz core of the smoothed covariance: the lag-domain snapshot
/// weights each source by p_k |g_k|^2, so the quadratic form must place
/// |g_k| (not |g_k|^2) in the column.
inline AugmentedManifold augmented_manifold(const ChannelRealization& channel, int J,
                                            double d_over_lambda = kDefaultWavelengthRatio) {
    if (channel.layout.kind == ArrayKind::TLNA || channel.layout.kind == ArrayKind::CPA) {
        if (J != virtual_half_extent(channel.layout))
            throw invalid_parameter("augmented_manifold: J does not match the layout");
    }
    AugmentedManifold m;
    m.J = J;
    m.scale = std::pow(static_cast<double>(J), -0.25);
    m.B1.resize(J, channel.user_count());
    for (int k = 0; k < channel.user_count(); ++k) {
        const double amp = std::abs(channel.gains[k]);
        const double phase_per_lag = -2.0 * std::numbers::pi * d_over_lambda * std::sin(channel.angles[k]);
        for (int l = 0; l < J; ++l) m.B1(l, k) = amp * std::polar(1.0, phase_per_lag * l);
    }
    return m;
}

/// The physical array viewed through the same equivalent-model interface
/// (B1 = H, unit scale); lets the ULA baseline share the receiver path.
inline AugmentedManifold physical_manifold(const ChannelRealization& channel) {
    AugmentedManifold m;
    m.J = channel.layout.sensor_count();
    m.scale = 1.0;
    m.B1 = channel.H;
    return m;
}

/// x_a(t) = scale * (B1 s_a(t) + z_a(t)), z_a ~ CN(0, sigma_n^2 I_J).
inline MatrixC synthesize_augmented_snapshots(const AugmentedManifold& manifold, const MatrixC& S,
                                              double noise_power, Rng& rng) {
    if (S.rows() != manifold.B1.cols())
        throw invalid_parameter("synthesize_augmented_snapshots: symbol rows must match user count");
    MatrixC X = manifold.B1 * S;
    if (noise_power > 0) {
        for (Eigen::Index t = 0; t < X.cols(); ++t)
            for (Eigen::Index m = 0; m < X.rows(); ++m) X(m, t) += complex_gaussian(rng, noise_power);
    }
    return manifold.scale * X;
}

} // namespace sra
