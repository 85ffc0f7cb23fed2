#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sra/errors.hpp"
#include "sra/geometry.hpp"
#include "sra/rng.hpp"

namespace sra {

using Cplx = std::complex<double>;
using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

constexpr double kDefaultWavelengthRatio = 0.5; // d / lambda

namespace qpsk {

/// Unit-power Gray-mapped QPSK. Index order is the documented slicer
/// tie-break order; bit 0 = (Re < 0), bit 1 = (Im < 0).
inline const std::array<Cplx, 4>& alphabet() {
    static const std::array<Cplx, 4> a = {
        Cplx(std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2),
        Cplx(std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2),
        Cplx(-std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2),
        Cplx(-std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2),
    };
    return a;
}

inline int bits(int symbol_index) { return symbol_index; } // Gray by construction

} // namespace qpsk

/// a(theta): entry exp(-j 2 pi (d/lambda) n sin(theta)) per sensor position n.
inline VectorC steering_vector(const SensorLayout& layout, double theta,
                               double d_over_lambda = kDefaultWavelengthRatio) {
    constexpr double half_pi = std::numbers::pi / 2;
    if (!(theta >= -half_pi && theta <= half_pi))
        throw invalid_parameter("steering_vector: angle outside [-pi/2, pi/2]");
    if (!(d_over_lambda > 0)) throw invalid_parameter("steering_vector: d/lambda must be positive");
    const double phase_per_unit = -2.0 * std::numbers::pi * d_over_lambda * std::sin(theta);
    VectorC a(layout.sensor_count());
    for (int m = 0; m < layout.sensor_count(); ++m)
        a[m] = std::polar(1.0, phase_per_unit * layout.positions[m]);
    return a;
}

struct AnglePolicy {
    enum class Kind { UniformRandom, FixedGrid } kind = Kind::UniformRandom;
    double min_separation_rad = 5.0 * std::numbers::pi / 180.0; // UniformRandom only
    double grid_span_rad = 2.0 * std::numbers::pi / 3.0;        // FixedGrid: angles span [-s/2, s/2]

    static AnglePolicy uniform(double min_sep_deg = 5.0) {
        AnglePolicy p;
        p.kind = Kind::UniformRandom;
        p.min_separation_rad = min_sep_deg * std::numbers::pi / 180.0;
        return p;
    }
    static AnglePolicy grid(double span_deg = 120.0) {
        AnglePolicy p;
        p.kind = Kind::FixedGrid;
        p.grid_span_rad = span_deg * std::numbers::pi / 180.0;
        return p;
    }
};

/// Per-trial uplink channel: K user angles, Rayleigh gains and the physical
/// channel matrix H with columns h_k = g_k a(theta_k).
struct ChannelRealization {
    std::vector<double> angles; // radians
    std::vector<Cplx> gains;
    MatrixC H; // M x K
    SensorLayout layout;
    double wavelength_ratio = kDefaultWavelengthRatio;

    int user_count() const { return static_cast<int>(angles.size()); }
};

inline std::vector<double> draw_angles(Rng& rng, int K, const AnglePolicy& policy) {
    std::vector<double> angles(K);
    constexpr double half_pi = std::numbers::pi / 2;
    if (policy.kind == AnglePolicy::Kind::FixedGrid) {
        const double half = policy.grid_span_rad / 2;
        for (int k = 0; k < K; ++k)
            angles[k] = (K == 1) ? 0.0 : -half + policy.grid_span_rad * k / (K - 1);
        return angles;
    }
    std::uniform_real_distribution<double> u(-half_pi, half_pi);
    constexpr int kMaxAttempts = 10000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        for (int k = 0; k < K; ++k) angles[k] = u(rng);
        auto sorted = angles;
        std::sort(sorted.begin(), sorted.end());
        bool ok = true;
        for (int k = 1; k < K && ok; ++k)
            ok = (sorted[k] - sorted[k - 1]) >= policy.min_separation_rad;
        if (ok) return angles;
    }
    throw runtime_failure("draw_angles: could not satisfy minimum separation after bounded retries");
}

inline ChannelRealization draw_channel(Rng& rng, const SensorLayout& layout, int K,
                                       const AnglePolicy& policy = {},
                                       double d_over_lambda = kDefaultWavelengthRatio) {
    if (K < 1) throw invalid_parameter("draw_channel: K must be >= 1");
    ChannelRealization ch;
    ch.layout = layout;
    ch.wavelength_ratio = d_over_lambda;
    ch.angles = draw_angles(rng, K, policy);
    ch.gains.resize(K);
    for (int k = 0; k < K; ++k) ch.gains[k] = complex_gaussian(rng); // g_k ~ CN(0,1)
    ch.H.resize(layout.sensor_count(), K);
    for (int k = 0; k < K; ++k)
        ch.H.col(k) = ch.gains[k] * steering_vector(layout, ch.angles[k], d_over_lambda);
    return ch;
}

/// K x T i.i.d. QPSK symbols; row k scaled to average power powers[k].
inline MatrixC generate_symbols(Rng& rng, int K, int T, const std::vector<double>& powers) {
    if (static_cast<int>(powers.size()) != K)
        throw invalid_parameter("generate_symbols: powers size must equal K");
    for (double p : powers)
        if (!(p > 0)) throw invalid_parameter("generate_symbols: powers must be positive");
    MatrixC S(K, T);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int k = 0; k < K; ++k) {
        const double amp = std::sqrt(powers[k]);
        for (int t = 0; t < T; ++t) S(k, t) = amp * qpsk::alphabet()[pick(rng)];
    }
    return S;
}

struct SnapshotBlock {
    MatrixC X; // M x T
    MatrixC S; // K x T
    double noise_power = 0.0;
};

/// X = H S + Z with columns of Z i.i.d. CN(0, sigma_n^2 I).
inline SnapshotBlock received_block(const ChannelRealization& channel, const MatrixC& S,
                                    double noise_power, Rng& rng) {
    if (S.rows() != channel.H.cols())
        throw invalid_parameter("received_block: symbol rows must match user count");
    if (noise_power < 0) throw invalid_parameter("received_block: noise power must be >= 0");
    SnapshotBlock blk;
    blk.S = S;
    blk.noise_power = noise_power;
    blk.X = channel.H * S;
    if (noise_power > 0) {
        for (Eigen::Index t = 0; t < blk.X.cols(); ++t)
            for (Eigen::Index m = 0; m < blk.X.rows(); ++m)
                blk.X(m, t) += complex_gaussian(rng, noise_power);
    }
    return blk;
}

} // namespace sra
