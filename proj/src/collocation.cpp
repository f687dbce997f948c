#include "plaque/collocation.hpp"

#include "plaque/errors.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace plaque {

namespace {

struct Lu {
    int n = 0;
    std::vector<double> a;  // packed L\U
    std::vector<int> piv;   // row swaps
    bool singular = false;
};

Lu lu_factor(std::vector<double> a, int n) {
    Lu lu;
    lu.n = n;
    lu.piv.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a[static_cast<size_t>(k) * n + k]);
        for (int r = k + 1; r < n; ++r) {
            const double cand = std::abs(a[static_cast<size_t>(r) * n + k]);
            if (cand > best) {
                best = cand;
                p = r;
            }
        }
        lu.piv[static_cast<size_t>(k)] = p;
        if (best == 0.0) {
            lu.singular = true;
            lu.a = std::move(a);
            return lu;
        }
        if (p != k)
            for (int c = 0; c < n; ++c)
                std::swap(a[static_cast<size_t>(k) * n + c], a[static_cast<size_t>(p) * n + c]);
        const double pivot = a[static_cast<size_t>(k) * n + k];
        for (int r = k + 1; r < n; ++r) {
            const double m = a[static_cast<size_t>(r) * n + k] / pivot;
            a[static_cast<size_t>(r) * n + k] = m;
            if (m != 0.0)
                for (int c = k + 1; c < n; ++c)
                    a[static_cast<size_t>(r) * n + c] -= m * a[static_cast<size_t>(k) * n + c];
        }
    }
    lu.a = std::move(a);
    return lu;
}

void lu_solve_inplace(const Lu& lu, std::vector<double>& b) {
    // Factorization swaps whole rows (multipliers included), so the
    // permutation must be applied to b in full before substitution.
    const int n = lu.n;
    for (int k = 0; k < n; ++k) {
        const int p = lu.piv[static_cast<size_t>(k)];
        if (p != k) std::swap(b[static_cast<size_t>(k)], b[static_cast<size_t>(p)]);
    }
    for (int k = 1; k < n; ++k)
        for (int c = 0; c < k; ++c)
            b[static_cast<size_t>(k)] -= lu.a[static_cast<size_t>(k) * n + c] * b[static_cast<size_t>(c)];
    for (int k = n - 1; k >= 0; --k) {
        for (int c = k + 1; c < n; ++c)
            b[static_cast<size_t>(k)] -= lu.a[static_cast<size_t>(k) * n + c] * b[static_cast<size_t>(c)];
        b[static_cast<size_t>(k)] /= lu.a[static_cast<size_t>(k) * n + k];
    }
}

double matrix_inf_norm(std::span<const double> a, int n) {
    double norm = 0.0;
    for (int r = 0; r < n; ++r) {
        double row = 0.0;
        for (int c = 0; c < n; ++c) row += std::abs(a[static_cast<size_t>(r) * n + c]);
        norm = std::max(norm, row);
    }
    return norm;
}

double vector_inf_norm(std::span<const double> v) {
    double norm = 0.0;
    for (double x : v) norm = std::max(norm, std::abs(x));
    return norm;
}

} // namespace

FieldSystem assemble_collocation_system(const BasisSpec& spec, Field field, long time_index,
                                        double hstar_a, std::span<const double> hstar_drift,
                                        double hstar_drift_closure,
                                        std::span<const double> rhs_nodes, double rhs_closure) {
    const int nn = spec.n_nodes;
    const int n = spec.order + 1;
    if (hstar_drift.size() != static_cast<size_t>(nn) || rhs_nodes.size() != static_cast<size_t>(nn))
        throw std::invalid_argument("assemble_collocation_system: nodal array length mismatch");

    FieldSystem sys;
    sys.field = field;
    sys.time_index = time_index;
    sys.n = n;
    sys.matrix.resize(static_cast<size_t>(n) * n);
    sys.rhs.resize(static_cast<size_t>(n));

    const double diff_w = hstar_a * spec.chain_d2;
    for (int j = 0; j < nn; ++j) {
        const double conv_w = hstar_drift[static_cast<size_t>(j)] * spec.chain_d1;
        for (int i = 0; i < n; ++i)
            sys.matrix[static_cast<size_t>(j) * n + i] =
                spec.t0_at(i, j) - diff_w * spec.t2_at(i, j) + conv_w * spec.t1_at(i, j);
        sys.rhs[static_cast<size_t>(j)] = rhs_nodes[static_cast<size_t>(j)];
    }
    const double conv_c = hstar_drift_closure * spec.chain_d1;
    for (int i = 0; i < n; ++i)
        sys.matrix[static_cast<size_t>(nn) * n + i] = spec.e0[static_cast<size_t>(i)] -
                                                      diff_w * spec.e2[static_cast<size_t>(i)] +
                                                      conv_c * spec.e1[static_cast<size_t>(i)];
    sys.rhs[static_cast<size_t>(nn)] = rhs_closure;
    return sys;
}

std::vector<double> solve_dense(const FieldSystem& system) {
    const int n = system.n;
    const Lu lu = lu_factor(system.matrix, n);
    if (lu.singular)
        throw NumericallySingular("dense solve: exact zero pivot for field " +
                                      std::string(field_name(system.field)),
                                  system.time_index);
    std::vector<double> x = system.rhs;
    lu_solve_inplace(lu, x);

    double res = 0.0;
    for (int r = 0; r < n; ++r) {
        double ax = 0.0;
        for (int c = 0; c < n; ++c)
            ax += system.matrix[static_cast<size_t>(r) * n + c] * x[static_cast<size_t>(c)];
        res = std::max(res, std::abs(ax - system.rhs[static_cast<size_t>(r)]));
    }
    const double bound = 1e-10 * (matrix_inf_norm(system.matrix, n) * vector_inf_norm(x) +
                                  vector_inf_norm(system.rhs));
    if (!(res <= bound) || !std::isfinite(res))
        throw NumericallySingular("dense solve: residual " + std::to_string(res) +
                                      " exceeds acceptance bound for field " +
                                      std::string(field_name(system.field)),
                                  system.time_index);
    return x;
}

double condition_number(std::span<const double> matrix, int n) {
    const Lu lu = lu_factor(std::vector<double>(matrix.begin(), matrix.end()), n);
    if (lu.singular) throw NumericallySingular("condition estimate: matrix is singular");

    std::vector<double> inv(static_cast<size_t>(n) * n);
    std::vector<double> col(static_cast<size_t>(n));
    for (int c = 0; c < n; ++c) {
        std::fill(col.begin(), col.end(), 0.0);
        col[static_cast<size_t>(c)] = 1.0;
        lu_solve_inplace(lu, col);
        for (int r = 0; r < n; ++r) inv[static_cast<size_t>(r) * n + c] = col[static_cast<size_t>(r)];
    }
    const double kappa = matrix_inf_norm(matrix, n) * matrix_inf_norm(inv, n);
    if (!std::isfinite(kappa)) throw NumericallySingular("condition estimate: non-finite");
    return kappa;
}

namespace {

// Legendre coefficients of f^v from nodal values by quadrature; degree
// cap n_nodes-1 keeps every projection integral inside the rule's
// exactness range.
std::vector<double> velocity_coeffs(const BasisSpec& spec, std::span<const double> fv_nodes) {
    const int nn = spec.n_nodes;
    if (fv_nodes.size() != static_cast<size_t>(nn))
        throw std::invalid_argument("compute_velocity: nodal array length mismatch");
    std::vector<double> c(static_cast<size_t>(nn));
    for (int k = 0; k < nn; ++k) {
        double acc = 0.0;
        for (int j = 0; j < nn; ++j)
            acc += spec.wq[static_cast<size_t>(j)] * fv_nodes[static_cast<size_t>(j)] *
                   spec.legq[static_cast<size_t>(k) * nn + j];
        c[static_cast<size_t>(k)] = 0.5 * (2.0 * k + 1.0) * acc;
    }
    return c;
}

// -(1-R)/2 * sum_k c_k * int_x^1 L_k using the antiderivative identity
// (2k+1) int L_k = L_{k-1} - L_{k+1}.
double velocity_from_coeffs(std::span<const double> c, std::span<const double> legv, double R,
                            double x) {
    const int nn = static_cast<int>(c.size());
    double acc = c[0] * (1.0 - x);
    for (int k = 1; k < nn; ++k)
        acc += c[static_cast<size_t>(k)] *
               (legv[static_cast<size_t>(k - 1)] - legv[static_cast<size_t>(k + 1)]) /
               (2.0 * k + 1.0);
    return -0.5 * (1.0 - R) * acc;
}

} // namespace

VelocityProfile compute_velocity(const BasisSpec& spec, std::span<const double> fv_nodes,
                                 double R) {
    if (!(R > 0.0 && R < 1.0))
        throw DegenerateGeometry("compute_velocity: radius outside (0,1): " + std::to_string(R));
    const int nn = spec.n_nodes;
    const std::vector<double> c = velocity_coeffs(spec, fv_nodes);

    VelocityProfile prof;
    prof.node_values.resize(static_cast<size_t>(nn));
    std::vector<double> legv(static_cast<size_t>(nn) + 1);
    for (int j = 0; j < nn; ++j) {
        for (int k = 0; k <= nn; ++k)
            legv[static_cast<size_t>(k)] = spec.legq[static_cast<size_t>(k) * nn + j];
        prof.node_values[static_cast<size_t>(j)] =
            velocity_from_coeffs(c, legv, R, spec.xq[static_cast<size_t>(j)]);
    }
    prof.v0 = -(1.0 - R) * c[0]; // all k >= 1 antiderivatives vanish at x = -1
    prof.v1 = 0.0;
    return prof;
}

double velocity_at(const BasisSpec& spec, std::span<const double> fv_nodes, double R, double x) {
    if (!(R > 0.0 && R < 1.0))
        throw DegenerateGeometry("velocity_at: radius outside (0,1): " + std::to_string(R));
    const std::vector<double> c = velocity_coeffs(spec, fv_nodes);
    const LegendreTable lt = legendre_eval_upto(spec.n_nodes, x);
    return velocity_from_coeffs(c, lt.v, R, x);
}

} // namespace plaque
