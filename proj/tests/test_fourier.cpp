#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include "twophase/fourier.hpp"
#include <cmath>
#include <numbers>
#include <random>

using namespace twophase;
constexpr double pi = std::numbers::pi;

TEST_CASE("single-mode perturbation evaluates its cosine and derivative") {
    auto p = Perturbation::single_mode(2, 0.01, 0.5);
    CHECK(p.K() == 2);
    for (double th : {0.0, 0.3, 1.9, 4.4}) {
        CHECK(p.eval(th) == doctest::Approx(0.01 * std::cos(2 * th)).epsilon(1e-14));
        CHECK(p.eval_deriv(th) == doctest::Approx(-0.02 * std::sin(2 * th)).epsilon(1e-14));
    }
    CHECK(p.sup_norm() == doctest::Approx(0.01));
    CHECK_NOTHROW(p.validate());

    auto ps = Perturbation::single_mode(3, -0.02, 1.0, true);
    CHECK(ps.eval(0.7) == doctest::Approx(-0.02 * std::sin(2.1)).epsilon(1e-14));
}

TEST_CASE("projection recovers synthesized coefficients exactly") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<std::pair<double, double>> modes(6);
    for (auto& m : modes) m = {U(rng), U(rng)};
    auto samples = synthesize(modes, 64);
    auto back = project_modes(samples, 6);
    REQUIRE(back.size() == 6);
    for (int k = 0; k < 6; ++k) {
        CHECK(back[k].first == doctest::Approx(modes[k].first).epsilon(1e-13));
        CHECK(back[k].second == doctest::Approx(modes[k].second).epsilon(1e-13));
    }
    CHECK(std::abs(modal_mean(samples)) <= 1e-14);
}

TEST_CASE("mean offset appears only in the k = 0 channel") {
    std::vector<double> samples(32, 0.0);
    for (int j = 0; j < 32; ++j) samples[j] = 0.7 + 0.1 * std::sin(2 * pi * j / 32.0);
    CHECK(modal_mean(samples) == doctest::Approx(0.7).epsilon(1e-14));
    auto m = project_modes(samples, 3);
    CHECK(std::abs(m[0].first) <= 1e-14);
    CHECK(m[0].second == doctest::Approx(0.1).epsilon(1e-13));
}

TEST_CASE("validation guards the small-perturbation regime") {
    auto big = Perturbation::single_mode(1, 0.2, 0.5);  // 0.2 >= 0.5/4
    CHECK_THROWS_AS(big.validate(), std::invalid_argument);
    Perturbation neg;
    neg.base_radius = -1.0;
    CHECK_THROWS_AS(neg.validate(), std::invalid_argument);
    CHECK_THROWS_AS(Perturbation::single_mode(0, 0.1, 1.0), std::invalid_argument);
    std::vector<double> few(8, 0.0);
    CHECK_THROWS_AS(project_modes(few, 4), std::invalid_argument);
}
