#include <doctest.h>

#include "plaque/model.hpp"

#include <cmath>
#include <random>

using namespace plaque;

TEST_CASE("reaction values vanish with their driving concentration") {
    Parameters p;
    CHECK(reaction_hat(Field::L, p, {0.0, 3e-4, 1e-5}) == 0.0);
    CHECK(reaction_hat(Field::H, p, {2e-4, 0.0, 1e-5}) == 0.0);
}

TEST_CASE("foam ingestion at half saturation") {
    Parameters p;
    // F=0 kills every term except ingestion; L = K1 halves the saturation.
    const double got = reaction_hat(Field::F, p, {p.K1, 0.0, 0.0});
    CHECK(got == doctest::Approx(p.k1 * p.M0 / 2.0).epsilon(1e-14));
    CHECK(got == doctest::Approx(2.5e-4).epsilon(1e-14));
}

TEST_CASE("velocity law limits") {
    Parameters p;
    CHECK(velocity_rhs(p, {7e-4, 2e-4, p.M0}) == doctest::Approx(-p.mu2).epsilon(1e-14));
    CHECK(velocity_rhs(p, {0.0, 0.0, 0.0}) == doctest::Approx(-p.mu1).epsilon(1e-14));
}

TEST_CASE("velocity at the serum state matches direct re-evaluation") {
    Parameters p;
    const double got = velocity_rhs(p, {p.L0, p.H0, 0.0});
    // Independent scalar arithmetic: F=0 cancels M0 throughout.
    const double expect = 2.573e-3 * 14e-4 / (-2.541e-3 + 6e-4) - 0.015;
    CHECK(got == doctest::Approx(expect).epsilon(1e-13));
    CHECK(expect < 0.0); // delta + H0 < 0 at defaults
}

TEST_CASE("ingestion term cancels exactly between L and F rows") {
    Parameters p;
    p.mu1 = p.mu2 = p.lambda = 0.0;
    p.r1 = 0.0;
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 2e-3);
    for (int k = 0; k < 200; ++k) {
        const HatPoint s{dist(rng), 0.0, 0.0};
        const double sum = reaction_hat(Field::F, p, s) + reaction_hat(Field::L, p, s);
        CHECK(std::abs(sum) <= 1e-18);
    }
}

TEST_CASE("L and H reactions are nonpositive on the physical region") {
    Parameters p;
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> conc(0.0, 3e-3);
    std::uniform_real_distribution<double> frac(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const HatPoint s{conc(rng), conc(rng), frac(rng) * p.M0};
        CHECK(reaction_hat(Field::L, p, s) <= 0.0);
        CHECK(reaction_hat(Field::H, p, s) <= 0.0);
    }
}

TEST_CASE("singular denominators raise instead of clamping") {
    Parameters p;
    CHECK_THROWS_AS(velocity_rhs(p, {1e-4, -p.delta, 0.0}), SingularDenominator);
    CHECK_THROWS_AS(reaction_hat(Field::F, p, {1e-4, -p.delta, 1e-5}), SingularDenominator);
    CHECK_THROWS_AS(reaction_hat(Field::L, p, {-p.K1, 1e-4, 0.0}), SingularDenominator);
    CHECK_THROWS_AS(reaction_hat(Field::H, p, {1e-4, 1e-4, -p.K2}), SingularDenominator);
    // The L row has no delta+H denominator, so it must not trip there.
    CHECK_NOTHROW(reaction_hat(Field::L, p, {1e-4, -p.delta, 0.0}));
}

TEST_CASE("default parameters validate with the sign warning") {
    Parameters p;
    const auto rep = validate_params(p);
    CHECK(rep.ok());
    REQUIRE(rep.warnings.size() >= 1);
    CHECK(rep.warnings[0].find("delta + H0") != std::string::npos);
}

TEST_CASE("validation reports all violations at once") {
    Parameters p;
    p.epsilon = 1.2;
    p.D = 0.0;
    p.mu1 = -1.0;
    const auto rep = validate_params(p);
    CHECK_FALSE(rep.ok());
    bool saw_eps = false, saw_d = false, saw_mu = false;
    for (const auto& v : rep.violations) {
        if (v == "epsilon outside (0,1)") saw_eps = true;
        if (v == "D must be positive") saw_d = true;
        if (v == "mu1 must be positive") saw_mu = true;
    }
    CHECK(saw_eps);
    CHECK(saw_d);
    CHECK(saw_mu);
}
