#include <doctest.h>

#include "plaque/stepping.hpp"

#include <cmath>
#include <random>

using namespace plaque;

TEST_CASE("scheme constants") {
    const auto s = make_scheme(60.0, 600);
    CHECK(s.h == doctest::Approx(0.1).epsilon(1e-16));
    CHECK(s.hstar == 2.0 * s.h / 3.0); // bit-exact by construction
    CHECK(s.steps == 600);
    CHECK_THROWS(make_scheme(-1.0, 10));
    CHECK_THROWS(make_scheme(1.0, 0));
}

TEST_CASE("stencil is exact on linear and quadratic time polynomials") {
    const auto s = make_scheme(1.0, 10); // h = 0.1
    // u(t) = t around t_n = 0
    CHECK(stencil_combine(s, s.h, 0.0, -s.h) == doctest::Approx(1.0).epsilon(1e-15));

    // u(t) = t^2: derivative at t_{n+1} is 2 t_{n+1}
    for (double tn : {0.0, 0.3, 1.7, -0.4}) {
        for (double h : {0.1, 0.05, 0.018}) {
            const auto sc = make_scheme(h * 8, 8);
            const double up = (tn + h) * (tn + h);
            const double uc = tn * tn;
            const double um = (tn - h) * (tn - h);
            CHECK(stencil_combine(sc, up, uc, um) ==
                  doctest::Approx(2.0 * (tn + h)).epsilon(1e-13));
        }
    }
}

TEST_CASE("stencil defect on cubics shrinks at second order") {
    auto defect = [](double h) {
        const auto sc = make_scheme(h, 1);
        const double got = stencil_combine(sc, h * h * h, 0.0, -h * h * h);
        return std::abs(got - 3.0 * h * h); // truth: 3 t_{n+1}^2 at t_n = 0
    };
    const double d1 = defect(0.1);
    const double d2 = defect(0.05);
    CHECK(d1 == doctest::Approx(2.0 * 0.1 * 0.1 * 0.1 * 10).epsilon(1e-10)); // 2h^2 at h=0.1
    CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.01));
}

TEST_CASE("stencil equals the standard BDF2 combination") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const double h = 0.1;
    const auto s = make_scheme(h, 1);
    for (int k = 0; k < 100000; ++k) {
        const double a = dist(rng), b = dist(rng), c = dist(rng);
        const double mine = stencil_combine(s, a, b, c);
        const double bdf2 = (3.0 * a - 4.0 * b + c) / (2.0 * h);
        const double scale = (3.0 * std::abs(a) + 4.0 * std::abs(b) + std::abs(c)) / (2.0 * h);
        CHECK(std::abs(mine - bdf2) <= 1e-15 * (scale + std::abs(bdf2) + 1.0));
    }
}

TEST_CASE("extrapolation exact on linears with quadratic defect 2h^2") {
    CHECK(extrapolate(3.5, 3.5) == 3.5);
    const double t = 0.7, h = 0.05;
    CHECK(extrapolate(t, t - h) == doctest::Approx(t + h).epsilon(1e-16));

    const double got = extrapolate(t * t, (t - h) * (t - h));
    CHECK(std::abs(got - (t + h) * (t + h)) == doctest::Approx(2.0 * h * h).epsilon(1e-10));
}

TEST_CASE("radius update formula and fixed point") {
    const auto s = make_scheme(60.0, 600); // h = 0.1
    CHECK(update_radius(0.9, 0.9, 0.0, s) == 0.9);
    CHECK(update_radius(0.9, 0.9, -0.01, s) ==
          doctest::Approx(0.9 + (2.0 * 0.1 / 3.0) * (-0.01)).epsilon(1e-16));
    CHECK(update_radius(0.9, 0.9, -0.01, s) == doctest::Approx(0.8993333333).epsilon(1e-9));
}
