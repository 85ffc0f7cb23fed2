#include <doctest.h>

#include "sra/metrics.hpp"

using namespace sra;
using doctest::Approx;

namespace {

AugmentedManifold toy_manifold(MatrixC B1, double scale = 1.0) {
    AugmentedManifold m;
    m.J = static_cast<int>(B1.rows());
    m.B1 = std::move(B1);
    m.scale = scale;
    return m;
}

} // namespace

TEST_CASE("SINR hand values") {
    SUBCASE("single user, matched filter") {
        MatrixC B1(2, 1);
        B1 << Cplx(1, 0), Cplx(1, 0);
        const auto m = toy_manifold(B1);
        VectorC w = B1.col(0);
        // signal = p |w^H b|^2 = 1 * 4; noise = sn2 ||w||^2 = 0.5 * 2
        CHECK(sinr(w, m, {1.0}, 0.5, 0) == Approx(4.0));
    }
    SUBCASE("orthogonal interferer contributes nothing") {
        MatrixC B1(2, 2);
        B1 << Cplx(1, 0), Cplx(0, 0), Cplx(0, 0), Cplx(1, 0);
        const auto m = toy_manifold(B1);
        VectorC w(2);
        w << Cplx(1, 0), Cplx(0, 0);
        CHECK(sinr(w, m, {1.0, 100.0}, 0.25, 0) == Approx(4.0));
    }
    SUBCASE("interference enters the denominator") {
        MatrixC B1(1, 2);
        B1 << Cplx(1, 0), Cplx(1, 0);
        const auto m = toy_manifold(B1);
        VectorC w(1);
        w << Cplx(1, 0);
        // 1 / (2 + 0.5)
        CHECK(sinr(w, m, {1.0, 2.0}, 0.5, 0) == Approx(1.0 / 2.5));
    }
    SUBCASE("index range") {
        MatrixC B1 = MatrixC::Identity(2, 2);
        const auto m = toy_manifold(B1);
        VectorC w = VectorC::Ones(2);
        CHECK_THROWS_AS(sinr(w, m, {1.0, 1.0}, 0.1, 2), invalid_parameter);
    }
}

TEST_CASE("MMSE attains the maximum SINR over random competitors") {
    Rng rng = make_rng(41);
    const auto layout = build_ula(6);
    const auto ch = draw_channel(rng, layout, 3, AnglePolicy::grid());
    const auto m = physical_manifold(ch);
    const std::vector<double> powers = {1, 1, 1};
    const double sn2 = 0.2;
    for (int k = 0; k < 3; ++k) {
        const double best = sinr(mmse_filter(m, powers, sn2, k), m, powers, sn2, k);
        for (int i = 0; i < 20; ++i) {
            VectorC w(6);
            for (int j = 0; j < 6; ++j) w[j] = complex_gaussian(rng);
            CHECK(sinr(w, m, powers, sn2, k) <= best + 1e-12);
        }
    }
}

TEST_CASE("ASR accumulates log2(1 + SINR)") {
    MatrixC B1 = MatrixC::Identity(2, 2);
    const auto m = toy_manifold(B1);
    const std::vector<double> powers = {3.0, 3.0};
    const auto bank = design_filters(m, powers, 1.0);
    // Orthogonal users: SINR_k = p_k / sn2 = 3, ASR = 2 log2(4) = 4
    CHECK(achievable_sum_rate(bank, m, powers, 1.0) == Approx(4.0));
}

TEST_CASE("ASR grows with SNR") {
    Rng rng = make_rng(43);
    const auto layout = build_tlna(4, 4);
    const auto ch = draw_channel(rng, layout, 4, AnglePolicy::uniform());
    const auto m = augmented_manifold(ch, virtual_half_extent(layout));
    const std::vector<double> powers(4, 1.0);
    double prev = -1.0;
    for (double snr_db : {0.0, 5.0, 10.0, 15.0}) {
        const double sn2 = std::pow(10.0, -snr_db / 10.0);
        const auto bank = design_filters(m, powers, sn2);
        const double asr = achievable_sum_rate(bank, m, powers, sn2);
        CHECK(asr > prev);
        prev = asr;
    }
}

TEST_CASE("bit error rate counts rail sign flips") {
    MatrixC truth(1, 2), hard(1, 2);
    truth << Cplx(1, 1), Cplx(-1, -1);
    hard << Cplx(1, 1), Cplx(-1, -1);
    CHECK(bit_error_rate(hard, truth) == 0.0);
    hard(0, 1) = Cplx(1, -1); // one rail flipped on one symbol: 1 of 4 bits
    CHECK(bit_error_rate(hard, truth) == Approx(0.25));
    hard(0, 0) = Cplx(-1, 1); // another single-rail flip
    CHECK(bit_error_rate(hard, truth) == Approx(0.5));
    CHECK_THROWS_AS(bit_error_rate(MatrixC::Zero(1, 3), truth), invalid_parameter);
}

TEST_CASE("complexity report") {
    const auto rep = complexity_report(16, 5);
    CHECK(rep.J == 16);
    CHECK(rep.dominant_flops == Approx(16.0 * 16.0 * 16.0 / 3.0));
    CHECK(rep.measured_seconds > 0.0);
    CHECK(rep.measured_designs == 5);
    CHECK_THROWS_AS(complexity_report(0), invalid_parameter);
    // Dominant term is monotone in J
    CHECK(complexity_report(24, 1).dominant_flops > rep.dominant_flops);
}
