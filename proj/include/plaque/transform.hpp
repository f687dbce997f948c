#pragma once

#include "plaque/model.hpp"

namespace plaque {

// Published-formula discrepancies kept switchable so their effect can be
// measured.  Defaults follow the discrete equations actually solved.
struct SchemeVariants {
    // Divide the interface-velocity drift term v(0)(rho-1) by (1-R)^2
    // instead of (1-R).
    bool radius_drift_squared = false;
    // Divide the diffusion coefficient by (1-R) instead of (1-R)^2.
    bool diffusion_first_power = false;
    // Orientation of the interface Robin condition.  Default (false) is the
    // relaxing transfer uhat_rho(0) = +gamma(1-R)(uhat-serum): deviations
    // from the serum level decay at rate ~ diff*gamma/(1-R).  true selects
    // the opposite orientation uhat_rho(0) = -gamma(1-R)(uhat-serum), under
    // which the same rate amplifies deviations, so any nonzero solution
    // grows like exp(diff*gamma*t/(1-R)) and long-horizon runs abort; it is
    // kept only so the effect of the orientation can be measured.
    bool robin_slope_negative = false;
};

// Everything the coordinate/variable changes need about one field at one
// time level: interface radius R, interface velocity Rdot (already
// extrapolated by the caller where the scheme requires it), the field's
// flattening coefficient gamma, additive serum shift, and diffusion.
struct TransformContext {
    Field field = Field::L;
    double R = 0.0;
    double Rdot = 0.0;
    double gamma = 0.0;       // alpha for L/H, beta for F
    double shift = 0.0;       // L0, H0, 0
    double diff = 1.0;        // 1 for L/H, D for F
    double slope_sign = -1.0; // sign of w'/w relative to gamma(1-R)(1-rho)
};

TransformContext make_context(Field field, const Parameters& p, double R, double Rdot,
                              const SchemeVariants& variants = {});

// w(rho) = exp(-slope_sign * gamma (1-R)(1-rho)^2 / 2); multiplying
// (hat - shift) by w turns the Robin condition at rho=0 and the Neumann
// condition at rho=1 into plain Neumann conditions on the transformed
// field.  Which Robin orientation it absorbs is fixed by slope_sign.
double flatten_weight(const TransformContext& ctx, double rho);

// Logarithmic slope w'(rho)/w(rho) = slope_sign * gamma (1-R)(1-rho).
double weight_slope(const TransformContext& ctx, double rho);

double from_hat(const TransformContext& ctx, double rho, double hat);
double to_hat(const TransformContext& ctx, double rho, double transformed);

// Reconstruct all three hat concentrations from transformed values at one
// point (each field has its own weight and shift).
HatPoint hats_at(const Parameters& p, double R, double rho, double uL, double uH, double uF,
                 const SchemeVariants& variants = {});

// Diffusion coefficient of the fixed-domain equation, diff/(1-R)^2.
double diffusion_coeff(const TransformContext& ctx, const SchemeVariants& variants);

// Fixed-domain (front-fixed, unflattened) convection coefficient written
// on the left-hand side: curvature term, interface-velocity term, and for
// the foam field the bulk transport v/(1-R).  ctx.Rdot supplies v(0).
double fixed_drift(const TransformContext& ctx, double rho, double v_at_rho,
                   const SchemeVariants& variants);

// Full left-hand-side convection coefficient of the flattened equation:
// fixed_drift plus the 2*a*w'/w term contributed by the flattening.
// v_ext_at_rho is the time-extrapolated velocity at this point.
double drift_G(const TransformContext& ctx, double rho, double v_ext_at_rho,
               const SchemeVariants& variants);

// Right-hand side of the flattened equation for ctx.field:
//   w * reaction_hat(hats) + [sg gamma Rdot (1-rho)^2/2 + b s + a s^2
//                             + sg a gamma (1-R)] * u_field
// with s = weight_slope, sg = ctx.slope_sign, a = diffusion_coeff,
// b = fixed_drift.  The u terms collect everything the weight's space/time
// derivatives generate that the drift coefficient does not absorb.
double transformed_reaction(const TransformContext& ctx, const Parameters& p, double rho,
                            double uL, double uH, double uF, double v_ext_at_rho,
                            const SchemeVariants& variants);

} // namespace plaque
