#pragma once

#include "plaque/basis.hpp"
#include "plaque/collocation.hpp"
#include "plaque/model.hpp"
#include "plaque/stepping.hpp"
#include "plaque/transform.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace plaque {

// Extreme hat values over the collocation nodes at one time level, plus a
// soft range flag for the foam density (reported, never enforced).
struct Monitors {
    std::array<double, 3> hat_min{0.0, 0.0, 0.0};
    std::array<double, 3> hat_max{0.0, 0.0, 0.0};
    bool foam_range_violation = false;
};

// The coupled discrete state at one time level.  Coefficients are in the
// transformed variables; the velocity profile belongs to the same level.
struct SimState {
    long index = 0;
    double t = 0.0;
    double R = 0.0;
    std::vector<double> coeff_L, coeff_H, coeff_F;
    VelocityProfile v;
    Monitors monitors;

    const std::vector<double>& coeffs(Field f) const {
        return f == Field::L ? coeff_L : (f == Field::H ? coeff_H : coeff_F);
    }
};

// Extra terms added to the four right-hand sides (three transport
// equations and the velocity law).  Arguments are (rho, t).  Used both by
// the manufactured-solution harness and by stability perturbations; null
// members cost nothing.
struct Forcing {
    std::function<double(double, double)> fL, fH, fF, fv;

    bool any() const { return fL || fH || fF || fv; }
    double at(Field f, double rho, double t) const {
        const auto& fn = f == Field::L ? fL : (f == Field::H ? fH : fF);
        return fn ? fn(rho, t) : 0.0;
    }
};

struct SolveOptions {
    SchemeVariants variants;
    int stride = 1;             // keep every stride-th state (plus the last)
    bool zero_dynamics = false; // force all reaction and velocity RHS to zero
    bool freeze_velocity = false; // pin v = 0: static geometry (manufactured runs)
    Forcing forcing;
    // Optional initial transformed profiles (interpolated into the trial
    // space); default is the homogeneous rest state.
    std::function<double(Field, double)> initial_transformed;
};

struct Trajectory {
    Parameters params;
    StepScheme scheme;
    BasisSpec basis;
    SolveOptions options;
    std::vector<SimState> states;
    bool aborted = false;
    long abort_index = -1;
    std::string abort_reason;

    const SimState& at_index(long index) const; // exact step lookup
    const SimState& final_state() const { return states.back(); }
};

// Least-surprise helper: coefficients interpolating values(rho) at the
// collocation nodes plus the closure point.
std::vector<double> interpolate_coeffs(const BasisSpec& spec,
                                       const std::function<double(double)>& values);

SimState initial_state(const Parameters& p, const BasisSpec& spec, const SolveOptions& options);

// One implicit-Euler step of size h from level 0, fully linearized about
// level 0; supplies the second history level the two-history stencil
// needs without losing global second order.
SimState startup_step(const Parameters& p, const BasisSpec& spec, const StepScheme& scheme,
                      const SimState& s0, const SolveOptions& options);

// One two-history step: radius update, three field solves against the
// extrapolated reactions/velocities, then the new velocity profile.
SimState advance_step(const Parameters& p, const BasisSpec& spec, const StepScheme& scheme,
                      const SimState& s_n, const SimState& s_nm1, const SolveOptions& options);

// The implicit system of one field for one two-history step, exposed for
// conditioning studies.
FieldSystem assemble_field_system(Field field, const Parameters& p, const BasisSpec& spec,
                                  const StepScheme& scheme, const SimState& s_n,
                                  const SimState& s_nm1, double R_new,
                                  const SolveOptions& options);

// The startup (implicit Euler) system of one field; this is the first
// implicit solve a simulation performs.
FieldSystem assemble_startup_system(Field field, const Parameters& p, const BasisSpec& spec,
                                    const StepScheme& scheme, const SimState& s0,
                                    const SolveOptions& options);

// Full run: startup then steps 2..M.  Numerical failures abort the run
// and return the partial trajectory with the abort recorded.
Trajectory simulate(const Parameters& p, const BasisSpec& spec, const StepScheme& scheme,
                    const SolveOptions& options = {});

// Stability-experiment variant: perturbations p1..p3 enter the three
// transport right-hand sides, p4 the velocity law; all must stay within
// |p_i| <= eps1 (verified by sampling).  eps1 = 0 reproduces simulate
// bitwise.
struct Perturbations {
    std::function<double(double, double)> p1, p2, p3, p4;
};

Trajectory perturbed_simulate(const Parameters& p, const BasisSpec& spec,
                              const StepScheme& scheme, const Perturbations& pert, double eps1,
                              const SolveOptions& options = {});

} // namespace plaque
