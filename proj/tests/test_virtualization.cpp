#include <doctest.h>

#include "sra/virtualization.hpp"

using namespace sra;
using doctest::Approx;

namespace {

ChannelRealization fixed_channel(const SensorLayout& layout, std::vector<double> angles,
                                 std::vector<Cplx> gains) {
    ChannelRealization ch;
    ch.layout = layout;
    ch.angles = std::move(angles);
    ch.gains = std::move(gains);
    ch.H.resize(layout.sensor_count(), static_cast<int>(ch.angles.size()));
    for (int k = 0; k < ch.user_count(); ++k)
        ch.H.col(k) = ch.gains[k] * steering_vector(layout, ch.angles[k]);
    return ch;
}

} // namespace

TEST_CASE("vectorize_covariance is column-major") {
    MatrixC R(2, 2);
    R << Cplx(1, 0), Cplx(3, 1), Cplx(2, -1), Cplx(4, 0);
    const auto v = vectorize_covariance(R);
    CHECK(v[0] == R(0, 0));
    CHECK(v[1] == R(1, 0));
    CHECK(v[2] == R(0, 1));
    CHECK(v[3] == R(1, 1));
    CHECK_THROWS_AS(vectorize_covariance(MatrixC::Zero(2, 3)), invalid_parameter);
}

TEST_CASE("lag selection map on a 3-element ULA") {
    const auto layout = build_ula(3); // positions 0,1,2
    const auto map = build_lag_selection(layout, 3);
    CHECK(map.at_lag(0).size() == 3);
    CHECK(map.at_lag(2).size() == 1);
    CHECK(map.at_lag(2).front() == std::pair<int, int>(2, 0));
    CHECK(map.at_lag(-1).size() == 2);
    // Every lag of TLNA(4,4) up to its virtual extent is reachable
    CHECK_NOTHROW(build_lag_selection(build_tlna(4, 4), virtual_half_extent(build_tlna(4, 4))));
    // ULA(3) has no pair with lag 3
    CHECK_THROWS_AS(build_lag_selection(layout, 4), internal_consistency_error);
}

TEST_CASE("deduplication modes agree on an exact covariance") {
    const auto layout = build_tlna(2, 2);
    const auto ch = fixed_channel(layout, {0.3, -0.5}, {Cplx(0.8, 0.4), Cplx(-0.2, 1.1)});
    const auto R = exact_covariance(ch, {1.0, 2.0}, 0.7);
    const auto v = vectorize_covariance(R);
    const auto avg = deduplicate_and_sort(v, layout, DedupMode::Average);
    const auto first = deduplicate_and_sort(v, layout, DedupMode::FirstOccurrence);
    CHECK(avg.J == virtual_half_extent(layout));
    CHECK((avg.v - first.v).norm() < 1e-13);
    // Hermitian lag symmetry v(-l) = conj(v(l))
    for (int l = 0; l < avg.J; ++l)
        CHECK(std::abs(avg.at_lag(-l) - std::conj(avg.at_lag(l))) < 1e-13);
    // Zero lag carries the noise floor plus total received power
    const double expect0 = 0.7 + 1.0 * std::norm(ch.gains[0]) + 2.0 * std::norm(ch.gains[1]);
    CHECK(avg.at_lag(0).real() == Approx(expect0));
}

TEST_CASE("augmented steering carries squared gain magnitude") {
    const auto q = augmented_steering(0.0, Cplx(0.0, 2.0), 3);
    for (Eigen::Index i = 0; i < q.size(); ++i) CHECK(q[i] == Cplx(4.0, 0.0));
    const auto q2 = augmented_steering(std::numbers::pi / 6, Cplx(1.0, 0.0), 2);
    CHECK(q2[1] == Cplx(1.0, 0.0)); // lag 0
    CHECK(q2[2].imag() == Approx(-1.0)); // lag +1: exp(-j pi/2)
    CHECK_THROWS_AS(augmented_steering(0.0, Cplx(1.0, 0.0), 0), invalid_parameter);
}

TEST_CASE("hermitian_sqrt squares back and clamps negatives") {
    MatrixC A(2, 2);
    A << Cplx(2, 0), Cplx(0.5, 0.5), Cplx(0.5, -0.5), Cplx(3, 0);
    const auto S = hermitian_sqrt(A);
    CHECK((S * S - A).norm() < 1e-12);
    CHECK((S - S.adjoint()).norm() < 1e-12);
    MatrixC N = -MatrixC::Identity(2, 2);
    CHECK(hermitian_sqrt(N).norm() == Approx(0.0)); // clamped
}

TEST_CASE("spatial smoothing matches the closed form on an exact covariance") {
    // The pipeline applied to R_x must satisfy
    //   R_ss = (1/J) (B1 diag(p) B1^H + sigma_n^2 I)^2
    // with B1 the amplitude-scaled Vandermonde over lags 0..J-1.
    const std::vector<double> powers = {1.0, 1.3, 0.6};
    const double sn2 = 0.4;
    for (const auto& layout : {build_tlna(4, 4), build_cpa(5, 2)}) {
        Rng rng = make_rng(2024);
        const auto ch = draw_channel(rng, layout, 3, AnglePolicy::uniform());
        const int J = virtual_half_extent(layout);
        const auto R = exact_covariance(ch, powers, sn2);
        const auto vs = deduplicate_and_sort(vectorize_covariance(R), layout);
        const auto sc = spatial_smoothing(vs);
        const auto m = augmented_manifold(ch, J);
        Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(powers.data(), 3);
        const MatrixC core = m.B1 * p.asDiagonal() * m.B1.adjoint() +
                             sn2 * MatrixC::Identity(J, J);
        CHECK((sc.R_ss - (core * core) / static_cast<double>(J)).norm() / core.squaredNorm() < 1e-12);
        // And the Hermitian square root recovers the core up to 1/sqrt(J)
        CHECK((std::sqrt(static_cast<double>(J)) * sc.R_bar - core).norm() / core.norm() < 1e-10);
    }
}

TEST_CASE("smoothed covariance of a sample estimate stays PSD") {
    const auto layout = build_tlna(4, 4);
    Rng rng = make_rng(5);
    const auto ch = draw_channel(rng, layout, 4, AnglePolicy::uniform());
    const auto S = generate_symbols(rng, 4, 100, {1, 1, 1, 1});
    const auto blk = received_block(ch, S, 0.5, rng);
    const auto vs = deduplicate_and_sort(vectorize_covariance(sample_covariance(blk.X)), layout);
    const auto sc = spatial_smoothing(vs);
    Eigen::SelfAdjointEigenSolver<MatrixC> es(sc.R_ss);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);
    // R_bar^2 reproduces the PSD part of R_ss
    CHECK((sc.R_bar * sc.R_bar - sc.R_ss).norm() / sc.R_ss.norm() < 1e-8);
}

TEST_CASE("manifold interfaces") {
    const auto layout = build_tlna(4, 4);
    Rng rng = make_rng(6);
    const auto ch = draw_channel(rng, layout, 2, AnglePolicy::grid());
    const int J = virtual_half_extent(layout);
    SUBCASE("virtual manifold scale and shape") {
        const auto m = augmented_manifold(ch, J);
        CHECK(m.B1.rows() == J);
        CHECK(m.user_count() == 2);
        CHECK(m.scale == Approx(std::pow(static_cast<double>(J), -0.25)));
        // Row 0 is the gain amplitudes
        for (int k = 0; k < 2; ++k)
            CHECK(std::abs(m.B1(0, k)) == Approx(std::abs(ch.gains[k])));
        CHECK_THROWS_AS(augmented_manifold(ch, J + 1), invalid_parameter);
    }
    SUBCASE("physical manifold is the channel itself") {
        const auto m = physical_manifold(ch);
        CHECK(m.scale == 1.0);
        CHECK((m.B1 - ch.H).norm() == 0.0);
    }
    SUBCASE("synthesized snapshots are deterministic and noiseless-exact") {
        const auto m = augmented_manifold(ch, J);
        const auto S = generate_symbols(rng, 2, 8, {1.0, 1.0});
        Rng n1 = make_rng(77), n2 = make_rng(77);
        const auto X1 = synthesize_augmented_snapshots(m, S, 0.2, n1);
        const auto X2 = synthesize_augmented_snapshots(m, S, 0.2, n2);
        CHECK((X1 - X2).norm() == 0.0);
        Rng n3 = make_rng(0);
        const auto X0 = synthesize_augmented_snapshots(m, S, 0.0, n3);
        CHECK((X0 - m.scale * (m.B1 * S)).norm() < 1e-14);
    }
}
