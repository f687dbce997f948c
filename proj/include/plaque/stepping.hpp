#pragma once

namespace plaque {

// Time discretization constants.  The two-history stencil
//   du/dt ~ (u_{n+1} - u_n + (u_{n-1} - u_n)/3) / (2h/3)
// is algebraically the BDF2 combination; hstar = 2h/3 is the effective
// implicit step weight.
struct StepScheme {
    double h = 0.0;     // days
    double hstar = 0.0; // 2h/3 exactly
    int steps = 0;      // M
};

StepScheme make_scheme(double T, int steps);

// Discrete time derivative at level n+1 from three consecutive levels;
// exact on quadratics in t.
double stencil_combine(const StepScheme& scheme, double u_np1, double u_n, double u_nm1);

// Two-level linearization value for t_{n+1}; exact on linears in t.
double extrapolate(double u_n, double u_nm1);

// Interface update R_{n+1} = R_n - (R_{n-1} - R_n)/3 + hstar * v_n(0).
// Range checking is the caller's job (the solver maps escapes from (0,1)
// to DegenerateGeometry).
double update_radius(double R_n, double R_nm1, double v_n0, const StepScheme& scheme);

} // namespace plaque
