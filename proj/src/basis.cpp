#include "plaque/basis.hpp"

#include "plaque/errors.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace plaque {

namespace {

// Powers x^0..x^kmax.
std::vector<double> power_table(double x, int kmax) {
    std::vector<double> p(static_cast<size_t>(kmax) + 1);
    p[0] = 1.0;
    for (int k = 1; k <= kmax; ++k) p[k] = p[k - 1] * x;
    return p;
}

double tfbl_mix(int n) {
    // Coefficient of L_{n+2} chosen so p_n'(+-1) = 0; zero for n = 0.
    return static_cast<double>(n) * (n + 1) / (static_cast<double>(n + 2) * (n + 3));
}

} // namespace

const char* basis_name(BasisKind kind) {
    return kind == BasisKind::TFBM ? "tfbm" : "tfbl";
}

LegendreTable legendre_eval_upto(int nmax, double x) {
    if (nmax < 0) throw std::invalid_argument("legendre_eval_upto: nmax must be >= 0");
    if (std::abs(x) > 1.0 + 1e-12)
        throw std::domain_error("legendre_eval_upto: x outside [-1,1]: " + std::to_string(x));

    LegendreTable t;
    t.v.resize(static_cast<size_t>(nmax) + 1);
    t.d1.resize(static_cast<size_t>(nmax) + 1);
    t.d2.resize(static_cast<size_t>(nmax) + 1);

    t.v[0] = 1.0;
    t.d1[0] = 0.0;
    t.d2[0] = 0.0;
    if (nmax == 0) return t;

    t.v[1] = x;
    t.d1[1] = 1.0;
    t.d2[1] = 0.0;

    for (int n = 1; n < nmax; ++n) {
        const double a = (2.0 * n + 1.0) / (n + 1.0);
        const double b = static_cast<double>(n) / (n + 1.0);
        t.v[n + 1] = a * x * t.v[n] - b * t.v[n - 1];
        t.d1[n + 1] = a * (t.v[n] + x * t.d1[n]) - b * t.d1[n - 1];
        t.d2[n + 1] = a * (2.0 * t.d1[n] + x * t.d2[n]) - b * t.d2[n - 1];
    }
    return t;
}

GaussRule gauss_legendre_nodes(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_nodes: need n >= 1");

    GaussRule rule;
    rule.x.resize(static_cast<size_t>(n));
    rule.w.resize(static_cast<size_t>(n));

    constexpr int max_iter = 100;
    const double pi = std::acos(-1.0);

    // Roots come out descending from the Chebyshev guesses; only the
    // non-negative half is solved, the rest is mirrored exactly.
    const int half = (n + 1) / 2;
    for (int i = 1; i <= half; ++i) {
        double x = std::cos(pi * (i - 0.25) / (n + 0.5));
        double step = 0.0;
        for (int iter = 0; iter < max_iter; ++iter) {
            LegendreTable t = legendre_eval_upto(n, x);
            step = t.v[n] / t.d1[n];
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        LegendreTable t = legendre_eval_upto(n, x);
        if (std::abs(t.v[n] / t.d1[n]) > 1e-14)
            throw NumericalError("gauss_legendre_nodes: Newton failed to converge at n=" +
                                 std::to_string(n));
        if (2 * i == n + 1) x = 0.0; // middle root of an odd rule is exact
        const double dLn = legendre_eval_upto(n, x).d1[n];
        const double w = 2.0 / ((1.0 - x * x) * dLn * dLn);
        rule.x[static_cast<size_t>(n - i)] = x;
        rule.w[static_cast<size_t>(n - i)] = w;
        rule.x[static_cast<size_t>(i - 1)] = -x;
        rule.w[static_cast<size_t>(i - 1)] = w;
    }
    return rule;
}

TrialValue trial_eval(BasisKind kind, int i, double point) {
    if (i < 0) throw std::out_of_range("trial_eval: negative index");

    if (kind == BasisKind::TFBM) {
        if (point < -1e-12 || point > 1.0 + 1e-12)
            throw std::domain_error("trial_eval: rho outside [0,1]");
        if (i == 0) return {1.0, 0.0, 0.0};
        // p_i = rho^{i+2}/(i+2) - rho^{i+1}/(i+1); both built-in Neumann
        // conditions follow from p_i' = rho^i (rho - 1).
        const auto pw = power_table(point, i + 2);
        TrialValue out;
        out.v = pw[i + 2] / (i + 2) - pw[i + 1] / (i + 1);
        out.d1 = pw[i + 1] - pw[i];
        out.d2 = (i + 1) * pw[i] - (i > 0 ? i * pw[i - 1] : 0.0);
        return out;
    }

    const LegendreTable t = legendre_eval_upto(i + 2, point);
    const double d = tfbl_mix(i);
    return {t.v[i] - d * t.v[i + 2], t.d1[i] - d * t.d1[i + 2], t.d2[i] - d * t.d2[i + 2]};
}

BasisSpec make_basis(BasisKind kind, int order) {
    if (order < 1) throw std::invalid_argument("make_basis: order must be >= 1");

    BasisSpec spec;
    spec.kind = kind;
    spec.order = order;
    spec.n_nodes = order;

    GaussRule rule = gauss_legendre_nodes(order);
    spec.xq = rule.x;
    spec.wq = rule.w;

    const size_t nn = static_cast<size_t>(order);
    spec.rho_nodes.resize(nn);
    for (size_t j = 0; j < nn; ++j) spec.rho_nodes[j] = map_from_reference(spec.xq[j]);

    if (kind == BasisKind::TFBM) {
        spec.nodes = spec.rho_nodes;
        spec.weights.resize(nn);
        for (size_t j = 0; j < nn; ++j) spec.weights[j] = 0.5 * spec.wq[j];
        spec.chain_d1 = 1.0;
        spec.chain_d2 = 1.0;
    } else {
        spec.nodes = spec.xq;
        spec.weights = spec.wq;
        spec.chain_d1 = map_d1;
        spec.chain_d2 = map_d2;
    }

    const size_t rows = static_cast<size_t>(order) + 1;
    spec.t0.resize(rows * nn);
    spec.t1.resize(rows * nn);
    spec.t2.resize(rows * nn);
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < nn; ++j) {
            const TrialValue tv = trial_eval(kind, static_cast<int>(i), spec.nodes[j]);
            spec.t0[i * nn + j] = tv.v;
            spec.t1[i * nn + j] = tv.d1;
            spec.t2[i * nn + j] = tv.d2;
        }
    }

    const double closure = spec.native_of_rho(0.0);
    spec.e0.resize(rows);
    spec.e1.resize(rows);
    spec.e2.resize(rows);
    for (size_t i = 0; i < rows; ++i) {
        const TrialValue tv = trial_eval(kind, static_cast<int>(i), closure);
        spec.e0[i] = tv.v;
        spec.e1[i] = tv.d1;
        spec.e2[i] = tv.d2;
    }

    spec.legq.resize((nn + 1) * nn);
    for (size_t j = 0; j < nn; ++j) {
        const LegendreTable lt = legendre_eval_upto(order, spec.xq[j]);
        for (size_t k = 0; k <= nn; ++k) spec.legq[k * nn + j] = lt.v[k];
    }
    return spec;
}

FieldSamples expansion_eval(const BasisSpec& spec, std::span<const double> coeffs,
                            std::span<const double> points) {
    if (coeffs.size() != static_cast<size_t>(spec.order) + 1)
        throw std::invalid_argument("expansion_eval: coefficient length mismatch");

    FieldSamples out;
    out.v.resize(points.size());
    out.d1.resize(points.size());
    out.d2.resize(points.size());

    for (size_t p = 0; p < points.size(); ++p) {
        const double x = points[p];
        double v = 0.0, d1 = 0.0, d2 = 0.0;
        if (spec.kind == BasisKind::TFBL) {
            const LegendreTable t = legendre_eval_upto(spec.order + 2, x);
            for (int i = 0; i <= spec.order; ++i) {
                const double c = coeffs[static_cast<size_t>(i)];
                const double d = tfbl_mix(i);
                v += c * (t.v[i] - d * t.v[i + 2]);
                d1 += c * (t.d1[i] - d * t.d1[i + 2]);
                d2 += c * (t.d2[i] - d * t.d2[i + 2]);
            }
        } else {
            if (x < -1e-12 || x > 1.0 + 1e-12)
                throw std::domain_error("expansion_eval: rho outside [0,1]");
            const auto pw = power_table(x, spec.order + 2);
            v = coeffs[0];
            for (int i = 1; i <= spec.order; ++i) {
                const double c = coeffs[static_cast<size_t>(i)];
                v += c * (pw[i + 2] / (i + 2) - pw[i + 1] / (i + 1));
                d1 += c * (pw[i + 1] - pw[i]);
                d2 += c * ((i + 1) * pw[i] - i * pw[i - 1]);
            }
        }
        out.v[p] = v;
        out.d1[p] = d1;
        out.d2[p] = d2;
    }
    return out;
}

std::vector<double> values_at_nodes(const BasisSpec& spec, std::span<const double> coeffs) {
    if (coeffs.size() != static_cast<size_t>(spec.order) + 1)
        throw std::invalid_argument("values_at_nodes: coefficient length mismatch");
    const size_t nn = static_cast<size_t>(spec.n_nodes);
    std::vector<double> out(nn, 0.0);
    for (size_t i = 0; i < coeffs.size(); ++i) {
        const double c = coeffs[i];
        if (c == 0.0) continue;
        const double* row = spec.t0.data() + i * nn;
        for (size_t j = 0; j < nn; ++j) out[j] += c * row[j];
    }
    return out;
}

TrialValue closure_eval(const BasisSpec& spec, std::span<const double> coeffs) {
    if (coeffs.size() != static_cast<size_t>(spec.order) + 1)
        throw std::invalid_argument("closure_eval: coefficient length mismatch");
    TrialValue out{0.0, 0.0, 0.0};
    for (size_t i = 0; i < coeffs.size(); ++i) {
        out.v += coeffs[i] * spec.e0[i];
        out.d1 += coeffs[i] * spec.e1[i];
        out.d2 += coeffs[i] * spec.e2[i];
    }
    return out;
}

} // namespace plaque
