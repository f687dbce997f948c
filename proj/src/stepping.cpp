#include "plaque/stepping.hpp"

#include <stdexcept>

namespace plaque {

StepScheme make_scheme(double T, int steps) {
    if (!(T > 0.0) || steps < 1) throw std::invalid_argument("make_scheme: need T > 0, steps >= 1");
    StepScheme s;
    s.h = T / steps;
    s.hstar = 2.0 * s.h / 3.0;
    s.steps = steps;
    return s;
}

double stencil_combine(const StepScheme& scheme, double u_np1, double u_n, double u_nm1) {
    return (u_np1 - u_n + (u_nm1 - u_n) / 3.0) / scheme.hstar;
}

double extrapolate(double u_n, double u_nm1) { return 2.0 * u_n - u_nm1; }

double update_radius(double R_n, double R_nm1, double v_n0, const StepScheme& scheme) {
    return R_n - (R_nm1 - R_n) / 3.0 + scheme.hstar * v_n0;
}

} // namespace plaque
