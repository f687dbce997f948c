#pragma once

#include <span>
#include <vector>

namespace plaque {

enum class BasisKind { TFBM, TFBL };

const char* basis_name(BasisKind kind);

// Values and first/second derivatives of Legendre polynomials L_0..L_nmax
// at a single point, filled by the three-term recurrence.
struct LegendreTable {
    std::vector<double> v;  // L_n(x)
    std::vector<double> d1; // L_n'(x)
    std::vector<double> d2; // L_n''(x)
};

LegendreTable legendre_eval_upto(int nmax, double x);

// n-point Gauss rule on [-1,1]: nodes are the roots of the degree-n
// Legendre polynomial, ascending and exactly symmetric about 0.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

GaussRule gauss_legendre_nodes(int n);

// Trial function value and derivatives in the basis's native coordinate
// (TFBM: rho in [0,1]; TFBL: x in [-1,1]).
struct TrialValue {
    double v;
    double d1;
    double d2;
};

TrialValue trial_eval(BasisKind kind, int i, double point);

// Affine map between the physical interval [0,1] and the reference
// interval [-1,1], with the chain-rule factors for derivatives.
inline double map_to_reference(double rho) { return 2.0 * rho - 1.0; }
inline double map_from_reference(double x) { return 0.5 * (x + 1.0); }
inline constexpr double map_d1 = 2.0; // d x / d rho
inline constexpr double map_d2 = 4.0; // (d x / d rho)^2

// Precomputed collocation data for one basis family at a fixed order N.
// There are N interior nodes; together with one closure row at rho = 0 a
// time step solves an (N+1) x (N+1) system for the N+1 coefficients.
struct BasisSpec {
    BasisKind kind = BasisKind::TFBL;
    int order = 0;   // N; trial indices 0..N
    int n_nodes = 0; // = order

    std::vector<double> xq; // Gauss nodes on [-1,1], ascending
    std::vector<double> wq; // Gauss weights, sum 2

    std::vector<double> rho_nodes; // nodes mapped to [0,1]
    std::vector<double> nodes;     // nodes in the native interval
    std::vector<double> weights;   // quadrature weights on the native interval

    // Trial tables, row-major (order+1) x n_nodes, native-coordinate
    // derivatives.  Multiply d1/d2 rows by the chain factors below to get
    // rho-derivatives.
    std::vector<double> t0, t1, t2;

    // Trial values at the closure point (native image of rho = 0).
    std::vector<double> e0, e1, e2;

    // Legendre values L_k(xq_j), k = 0..n_nodes, row-major
    // (n_nodes+1) x n_nodes; used by the velocity reconstruction.
    std::vector<double> legq;

    double chain_d1 = 1.0; // d(native)/d(rho)
    double chain_d2 = 1.0; // squared factor for second derivatives

    double native_of_rho(double rho) const {
        return kind == BasisKind::TFBL ? map_to_reference(rho) : rho;
    }

    double t0_at(int i, int j) const { return t0[static_cast<size_t>(i) * n_nodes + j]; }
    double t1_at(int i, int j) const { return t1[static_cast<size_t>(i) * n_nodes + j]; }
    double t2_at(int i, int j) const { return t2[static_cast<size_t>(i) * n_nodes + j]; }
};

BasisSpec make_basis(BasisKind kind, int order);

// An expansion sampled at a set of native-coordinate points.
struct FieldSamples {
    std::vector<double> v;
    std::vector<double> d1; // native-coordinate derivative
    std::vector<double> d2;
};

FieldSamples expansion_eval(const BasisSpec& spec, std::span<const double> coeffs,
                            std::span<const double> points);

// Expansion values at the spec's own collocation nodes (uses the tables).
std::vector<double> values_at_nodes(const BasisSpec& spec, std::span<const double> coeffs);

// Expansion value/derivatives at the closure point rho = 0.
TrialValue closure_eval(const BasisSpec& spec, std::span<const double> coeffs);

} // namespace plaque
