#include <doctest.h>

#include "plaque/collocation.hpp"
#include "plaque/errors.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

using namespace plaque;

namespace {

// Independent Gauss-Jordan elimination with partial pivoting.
std::vector<double> gauss_jordan(std::vector<double> a, std::vector<double> b, int n) {
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int r = k + 1; r < n; ++r)
            if (std::abs(a[static_cast<size_t>(r) * n + k]) >
                std::abs(a[static_cast<size_t>(p) * n + k]))
                p = r;
        for (int c = 0; c < n; ++c)
            std::swap(a[static_cast<size_t>(k) * n + c], a[static_cast<size_t>(p) * n + c]);
        std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(p)]);
        const double piv = a[static_cast<size_t>(k) * n + k];
        for (int c = 0; c < n; ++c) a[static_cast<size_t>(k) * n + c] /= piv;
        b[static_cast<size_t>(k)] /= piv;
        for (int r = 0; r < n; ++r) {
            if (r == k) continue;
            const double m = a[static_cast<size_t>(r) * n + k];
            if (m == 0.0) continue;
            for (int c = 0; c < n; ++c)
                a[static_cast<size_t>(r) * n + c] -= m * a[static_cast<size_t>(k) * n + c];
            b[static_cast<size_t>(r)] -= m * b[static_cast<size_t>(k)];
        }
    }
    return b;
}

FieldSystem tiny_system(std::vector<double> m, std::vector<double> b) {
    FieldSystem sys;
    sys.field = Field::L;
    sys.time_index = 0;
    sys.n = static_cast<int>(b.size());
    sys.matrix = std::move(m);
    sys.rhs = std::move(b);
    return sys;
}

} // namespace

TEST_CASE("dense solve fixed cases") {
    auto id = tiny_system({1, 0, 0, 1}, {3.5, -2.0});
    auto x = solve_dense(id);
    CHECK(x[0] == 3.5);
    CHECK(x[1] == -2.0);

    auto diag = tiny_system({2, 0, 0, 4}, {2, 8});
    x = solve_dense(diag);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("dense solve matches a gauss-jordan oracle") {
    std::mt19937 rng(321);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 20;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(static_cast<size_t>(n) * n), b(static_cast<size_t>(n));
        for (auto& v : a) v = dist(rng);
        for (auto& v : b) v = dist(rng);
        const auto mine = solve_dense(tiny_system(a, b));
        const auto oracle = gauss_jordan(a, b, n);
        for (int i = 0; i < n; ++i)
            CHECK(std::abs(mine[static_cast<size_t>(i)] - oracle[static_cast<size_t>(i)]) <=
                  1e-11 * (1.0 + std::abs(oracle[static_cast<size_t>(i)])));
    }
}

TEST_CASE("dense solve residual bound holds on random well-conditioned systems") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int n = 12;
    int accepted = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> a(static_cast<size_t>(n) * n), b(static_cast<size_t>(n));
        for (auto& v : a) v = dist(rng);
        for (auto& v : b) v = dist(rng);
        if (condition_number(a, n) >= 1e8) continue;
        ++accepted;
        CHECK_NOTHROW(solve_dense(tiny_system(a, b))); // residual enforced inside
    }
    CHECK(accepted > 900); // random dense systems are almost never ill-conditioned
}

TEST_CASE("exactly singular systems are reported") {
    // Duplicate rows force a zero pivot.
    auto sys = tiny_system({1, 2, 1, 2}, {1, 1});
    CHECK_THROWS_AS(solve_dense(sys), NumericallySingular);
    CHECK_THROWS_AS(condition_number(std::vector<double>{1, 2, 1, 2}, 2), NumericallySingular);
}

TEST_CASE("condition number fixed cases") {
    CHECK(condition_number(std::vector<double>{1, 0, 0, 1}, 2) == doctest::Approx(1.0));
    // ||A||_inf = 7, ||A^-1||_inf = 3 for [[1,2],[3,4]]
    CHECK(condition_number(std::vector<double>{1, 2, 3, 4}, 2) ==
          doctest::Approx(21.0).epsilon(1e-12));
}

TEST_CASE("zero-step assembly is the interpolation system") {
    for (BasisKind kind : {BasisKind::TFBM, BasisKind::TFBL}) {
        const auto spec = make_basis(kind, 8);
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        std::vector<double> coeffs(9);
        for (auto& c : coeffs) c = dist(rng);

        const auto nodal = values_at_nodes(spec, coeffs);
        const double closure = closure_eval(spec, coeffs).v;
        const std::vector<double> drift(static_cast<size_t>(spec.n_nodes), 0.0);

        const auto sys =
            assemble_collocation_system(spec, Field::H, 3, 0.0, drift, 0.0, nodal, closure);
        const auto got = solve_dense(sys);
        // Coefficient recovery is limited by the evaluation matrix's
        // conditioning; the monomial family is ill-conditioned by design.
        const double tol = kind == BasisKind::TFBL ? 1e-12 : 1e-7;
        for (int i = 0; i <= 8; ++i)
            CHECK(got[static_cast<size_t>(i)] ==
                  doctest::Approx(coeffs[static_cast<size_t>(i)]).epsilon(tol).scale(1.0));
        // In value space the interpolation is exact regardless of kind.
        const auto back = values_at_nodes(spec, got);
        for (int j = 0; j < spec.n_nodes; ++j)
            CHECK(back[static_cast<size_t>(j)] ==
                  doctest::Approx(nodal[static_cast<size_t>(j)]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("zero data stays zero through assembly and solve") {
    const auto spec = make_basis(BasisKind::TFBL, 10);
    std::vector<double> drift(static_cast<size_t>(spec.n_nodes), 0.7);
    std::vector<double> zero(static_cast<size_t>(spec.n_nodes), 0.0);
    const auto sys = assemble_collocation_system(spec, Field::F, 1, 0.02, drift, 0.7, zero, 0.0);
    const auto x = solve_dense(sys);
    for (double xi : x) CHECK(xi == 0.0);
}

TEST_CASE("assembly is bitwise deterministic") {
    const auto spec = make_basis(BasisKind::TFBL, 6);
    std::vector<double> drift{0.1, -0.2, 0.33, 1.4, -0.5, 0.06};
    std::vector<double> rhs{1, 2, 3, 4, 5, 6};
    const auto s1 = assemble_collocation_system(spec, Field::L, 9, 0.013, drift, 0.2, rhs, 7.0);
    const auto s2 = assemble_collocation_system(spec, Field::L, 9, 0.013, drift, 0.2, rhs, 7.0);
    CHECK(std::memcmp(s1.matrix.data(), s2.matrix.data(), s1.matrix.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(s1.rhs.data(), s2.rhs.data(), s1.rhs.size() * sizeof(double)) == 0);
}

TEST_CASE("velocity of a zero source vanishes") {
    const auto spec = make_basis(BasisKind::TFBL, 8);
    std::vector<double> fv(static_cast<size_t>(spec.n_nodes), 0.0);
    const auto prof = compute_velocity(spec, fv, 0.9);
    CHECK(prof.v0 == 0.0);
    CHECK(prof.v1 == 0.0);
    for (double v : prof.node_values) CHECK(v == 0.0);
}

TEST_CASE("velocity of a constant source is linear") {
    for (BasisKind kind : {BasisKind::TFBM, BasisKind::TFBL}) {
        const auto spec = make_basis(kind, 6);
        const double c = -0.0173, R = 0.85;
        std::vector<double> fv(static_cast<size_t>(spec.n_nodes), c);
        const auto prof = compute_velocity(spec, fv, R);
        CHECK(prof.v0 == doctest::Approx(-c * (1.0 - R)).epsilon(1e-14));
        CHECK(prof.v1 == 0.0);
        for (int j = 0; j < spec.n_nodes; ++j) {
            const double rho = spec.rho_nodes[static_cast<size_t>(j)];
            CHECK(prof.node_values[static_cast<size_t>(j)] ==
                  doctest::Approx(c * (1.0 - R) * (rho - 1.0)).epsilon(1e-13));
        }
    }
}

TEST_CASE("velocity profile matches the analytic antiderivative for degree N-1") {
    std::mt19937 rng(55);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const auto spec = make_basis(BasisKind::TFBL, 8);
    const double R = 0.9;

    std::vector<double> a(8); // degree 7 polynomial in rho
    for (auto& v : a) v = dist(rng);
    auto f = [&](double rho) {
        double acc = 0.0;
        for (int m = 7; m >= 0; --m) acc = acc * rho + a[static_cast<size_t>(m)];
        return acc;
    };
    auto anti = [&](double rho) { // integral from 0 to rho
        double acc = 0.0;
        for (int m = 7; m >= 0; --m) acc = (acc + a[static_cast<size_t>(m)] / (m + 1)) * rho;
        return acc;
    };
    auto v_true = [&](double rho) { return -(1.0 - R) * (anti(1.0) - anti(rho)); };

    std::vector<double> fv;
    for (double rho : spec.rho_nodes) fv.push_back(f(rho));

    const auto prof = compute_velocity(spec, fv, R);
    for (int j = 0; j < spec.n_nodes; ++j)
        CHECK(prof.node_values[static_cast<size_t>(j)] ==
              doctest::Approx(v_true(spec.rho_nodes[static_cast<size_t>(j)])).epsilon(1e-12).scale(1.0));
    CHECK(prof.v0 == doctest::Approx(v_true(0.0)).epsilon(1e-12).scale(1.0));
    CHECK(velocity_at(spec, fv, R, 0.1) ==
          doctest::Approx(v_true(map_from_reference(0.1))).epsilon(1e-12).scale(1.0));
}

TEST_CASE("interface velocity is exact through degree 2N-1") {
    std::mt19937 rng(56);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int order = 8;
    const auto spec = make_basis(BasisKind::TFBM, order);
    const double R = 0.4;

    std::vector<double> a(static_cast<size_t>(2 * order)); // degree 2N-1
    for (auto& v : a) v = dist(rng);
    auto f = [&](double rho) {
        double acc = 0.0;
        for (int m = 2 * order - 1; m >= 0; --m) acc = acc * rho + a[static_cast<size_t>(m)];
        return acc;
    };
    double integral = 0.0; // of f over [0,1]
    for (int m = 0; m < 2 * order; ++m) integral += a[static_cast<size_t>(m)] / (m + 1);

    std::vector<double> fv;
    for (double rho : spec.rho_nodes) fv.push_back(f(rho));
    const auto prof = compute_velocity(spec, fv, R);
    CHECK(prof.v0 == doctest::Approx(-(1.0 - R) * integral).epsilon(1e-12).scale(1.0));
}
