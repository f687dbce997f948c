#pragma once

#include "plaque/basis.hpp"
#include "plaque/model.hpp"

#include <span>
#include <vector>

namespace plaque {

// One field's dense implicit system for one time step.  Row order is
// fixed: rows 0..N-1 are the collocation nodes ascending, row N is the
// closure equation at rho = 0.  Column i multiplies coefficient a_i.
struct FieldSystem {
    Field field = Field::L;
    long time_index = 0;
    int n = 0; // order + 1
    std::vector<double> matrix; // row-major n*n
    std::vector<double> rhs;    // length n
};

// Assemble rows of the operator u - (h* a) u'' + h* G u' = rhs where a is
// the diffusion coefficient and G the full drift, both premultiplied by
// h* by the caller.  Derivatives in the trial tables are native and get
// the chain factors here; drift and rhs arrays are indexed like the
// nodes, with separate closure-point entries.
FieldSystem assemble_collocation_system(const BasisSpec& spec, Field field, long time_index,
                                        double hstar_a, std::span<const double> hstar_drift,
                                        double hstar_drift_closure,
                                        std::span<const double> rhs_nodes, double rhs_closure);

// LU solve with partial pivoting and a residual acceptance bound
// ||Ax-b||_inf <= 1e-10 (||A||_inf ||x||_inf + ||b||_inf).
std::vector<double> solve_dense(const FieldSystem& system);

// Infinity-norm condition estimate via the explicit inverse (systems here
// stay small).  Throws NumericallySingular when factorization breaks
// down, mirroring how unusable systems are reported elsewhere.
double condition_number(std::span<const double> matrix, int n);

// Tissue velocity reconstructed from the volume-source values f^v at the
// collocation nodes: v(rho) = -(1-R) * integral_rho^1 f^v, evaluated by
// Legendre expansion of f^v and term-wise antiderivatives.
struct VelocityProfile {
    std::vector<double> node_values; // at the collocation nodes
    double v0 = 0.0;                 // at rho = 0, drives the interface
    double v1 = 0.0;                 // at rho = 1, zero by construction
};

VelocityProfile compute_velocity(const BasisSpec& spec, std::span<const double> fv_nodes,
                                 double R);

// Velocity at one reference point x in [-1,1]; same expansion as
// compute_velocity (exposed for verification).
double velocity_at(const BasisSpec& spec, std::span<const double> fv_nodes, double R, double x);

} // namespace plaque
