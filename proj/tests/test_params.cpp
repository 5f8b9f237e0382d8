#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "iaw/params.hpp"

using namespace iaw;

TEST_CASE("preset wave speeds") {
    const PhysParams warm = warm_preset();
    CHECK(warm.wave_speed == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    const PhysParams cold = cold_preset();
    CHECK(cold.wave_speed == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("cold dispersion coefficient is 1/2") {
    // direct substitution: (1/2) * T_e^2 / (4 pi n_bar e^2 M V) with all
    // preset constants 1 and 4 pi n_bar = 1
    CHECK(cold_preset().dispersion == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(warm_preset().dispersion == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("invalid constants are rejected") {
    CHECK_THROWS_AS(make_params(0.0, 1.0, 0.0, 1.0, 1.0), param_error);
    CHECK_THROWS_AS(make_params(1.0, -1.0, 0.0, 1.0, 1.0), param_error);
    CHECK_THROWS_AS(make_params(1.0, 1.0, -0.1, 1.0, 1.0), param_error);
    CHECK_THROWS_AS(make_params(1.0, 1.0, 0.0, 0.0, 1.0), param_error);
    CHECK_THROWS_AS(make_params(1.0, 1.0, 0.0, 1.0, 0.0), param_error);
    CHECK_NOTHROW(make_params(1.0, 1.0, 0.0, 1.0, 1.0)); // T_i = 0 allowed
}

TEST_CASE("acoustic determinant at the preset roots") {
    const PhysParams warm = warm_preset();
    CHECK(std::fabs(acoustic_determinant(std::sqrt(2.0), warm)) <= 1e-14);
    CHECK(acoustic_determinant(1.0, warm) == doctest::Approx(-1.0).epsilon(1e-14));
    const PhysParams cold = cold_preset();
    CHECK(std::fabs(acoustic_determinant(1.0, cold)) <= 1e-14);
}

TEST_CASE("determinant vanishes at the derived speed for random draws") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> logu(-0.7, 0.7);
    for (int trial = 0; trial < 100; ++trial) {
        const double e = std::exp(logu(rng));
        const double M = std::exp(logu(rng));
        const double Te = std::exp(logu(rng));
        const double nb = std::exp(logu(rng));
        const double Ti = (trial % 3 == 0) ? 0.0 : std::exp(logu(rng));
        const PhysParams p = make_params(e, M, Ti, Te, nb);
        CHECK(std::fabs(acoustic_determinant(p.wave_speed, p)) <= 1e-13);
        // closed form: det = (e/T_e) (V^2 - (T_i + T_e)/M)
        std::uniform_real_distribution<double> vd(-3.0, 3.0);
        const double v = vd(rng);
        const double analytic = (e / Te) * (v * v - (Ti + Te) / M);
        CHECK(acoustic_determinant(v, p) == doctest::Approx(analytic).epsilon(1e-12));
        CHECK(acoustic_determinant(v, p) == doctest::Approx(acoustic_determinant(-v, p)).epsilon(1e-13));
    }
}
