#pragma once

#include "plaque/solver.hpp"

#include <array>
#include <span>
#include <vector>

namespace plaque {

// Errors of a coarse trajectory against a finer reference over the shared
// time grid, measured in the transformed variables.  Max-errors sample the
// evaluation basis's collocation nodes; the derivative norms use a Gauss
// rule two points larger than the evaluation order, which integrates the
// squared derivative difference of both expansions exactly.
struct ErrorReport {
    std::array<double, 3> max_err{0.0, 0.0, 0.0};  // per field, over nodes and shared times
    std::array<double, 3> deriv_l2{0.0, 0.0, 0.0}; // per field, max over shared times
    double radius_gap = 0.0;                       // max |R_coarse - R_ref|
    double xi = 0.0; // max over shared times of (sum of derivative norms + radius gap)
    int M = 0;       // coarse step count
    int N = 0;       // coarse basis order
};

// Requires ref to resolve every coarse output index exactly (reference
// step count a multiple of the coarse one, identical horizon).  Pass the
// finer of the two bases as eval_basis.
ErrorReport error_norms(const Trajectory& traj, const Trajectory& ref,
                        const BasisSpec& eval_basis);

// Observed order from errors e1, e2 at ladder sizes n1, n2 (step counts
// or basis orders): p = ln(e2/e1) / ln(n1/n2).
double convergence_rate(double e1, double e2, long n1, long n2);

struct ConvergenceRow {
    int ladder_value = 0; // M for time ladders, N for space ladders
    ErrorReport report;
    // Per-field observed order against the previous row; NaN on the first.
    std::array<double, 3> rate;
};

// Time self-convergence: one reference run at M_ref steps, one coarse run
// per ladder entry, errors and pairwise orders from the max-errors.
std::vector<ConvergenceRow> self_convergence_study(const Parameters& p, const BasisSpec& basis,
                                                   std::span<const int> M_list, int M_ref,
                                                   const SolveOptions& options = {});

// Space self-convergence at fixed step count: both expansions are
// evaluated on the reference basis's grid.
std::vector<ConvergenceRow> space_convergence_study(const Parameters& p, BasisKind kind,
                                                    std::span<const int> N_list, int N_ref,
                                                    int M, const SolveOptions& options = {});

// One manufactured field in the transformed variables, with the analytic
// derivatives the forcing construction needs.
struct ManufacturedField {
    std::function<double(double, double)> u, u_t, u_rho, u_rhorho;
};

struct ManufacturedCase {
    ManufacturedField L, H, F;

    const ManufacturedField& at(Field f) const {
        return f == Field::L ? L : (f == Field::H ? H : F);
    }
};

// Amplitude-scaled cos(pi rho) e^{-t} fields: endpoint derivatives vanish,
// and the default amplitudes keep every reaction denominator away from
// zero at the default parameters.
ManufacturedCase cosine_case(double ampL = 1e-3, double ampH = 5e-4, double ampF = 1e-5);

// q(rho) + c*t per field; the stepping formulas are exact on these, so
// the solved trajectory must track them to rounding.
ManufacturedCase additive_linear_case(double amp, double slope);

// The settled columns restrict the maximum to the second half of the run
// (2 index >= steps).  The single-Euler startup carries a stiff local
// transient, O(h^2 lambda/(1+h lambda)) for a diffusion eigenvalue
// lambda, that decays within a few steps; the settled window shows the
// scheme's order, the full window includes that transient.
struct MmsReport {
    std::array<double, 3> dev{0.0, 0.0, 0.0}; // per-field max deviation, nodes and times
    std::array<double, 3> settled{0.0, 0.0, 0.0};
    double max_dev = 0.0;
    double max_settled = 0.0;
};

// Frozen-geometry manufactured run: appends the analytic forcing that
// makes the case an exact solution of the flattened system, solves, and
// reports the deviation from it.  Verification oracle for the
// hand-derived transformed right-hand sides.  zero_dynamics drops the
// reactions from both sides; only then are fields linear in t exact,
// since the extrapolated reaction of a nonlinear term is not.
MmsReport mms_residual(const ManufacturedCase& mc, const Parameters& p, const BasisSpec& basis,
                       const StepScheme& scheme, const SchemeVariants& variants = {},
                       bool zero_dynamics = false);

struct ConditionEntry {
    BasisKind kind = BasisKind::TFBL;
    int N = 0;
    Field field = Field::L;
    bool singular = false;
    double cond = 0.0; // meaningful only when !singular
};

// Condition numbers of the startup matrices (the first implicit solve a
// run performs) per order and field.  Estimates at or beyond working
// precision, cond >= 1/((N+1) eps), are recorded as singular: the
// explicit inverse behind the estimate carries no reliable digits there.
std::vector<ConditionEntry> condition_sweep(BasisKind kind, std::span<const int> N_list,
                                            const Parameters& p, const StepScheme& scheme);

} // namespace plaque
