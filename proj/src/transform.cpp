#include "plaque/transform.hpp"

#include <cmath>
#include <string>

namespace plaque {

namespace {

void check_radius(double R) {
    if (!(R > 0.0 && R < 1.0))
        throw DegenerateGeometry("interface radius left (0,1): R = " + std::to_string(R));
}

} // namespace

TransformContext make_context(Field field, const Parameters& p, double R, double Rdot,
                              const SchemeVariants& variants) {
    check_radius(R);
    TransformContext ctx;
    ctx.field = field;
    ctx.R = R;
    ctx.Rdot = Rdot;
    ctx.slope_sign = variants.robin_slope_negative ? 1.0 : -1.0;
    switch (field) {
    case Field::L:
        ctx.gamma = p.alpha;
        ctx.shift = p.L0;
        ctx.diff = 1.0;
        break;
    case Field::H:
        ctx.gamma = p.alpha;
        ctx.shift = p.H0;
        ctx.diff = 1.0;
        break;
    case Field::F:
        ctx.gamma = p.beta;
        ctx.shift = 0.0;
        ctx.diff = p.D;
        break;
    }
    return ctx;
}

double flatten_weight(const TransformContext& ctx, double rho) {
    const double d = 1.0 - rho;
    return std::exp(-0.5 * ctx.slope_sign * ctx.gamma * (1.0 - ctx.R) * d * d);
}

double weight_slope(const TransformContext& ctx, double rho) {
    return ctx.slope_sign * ctx.gamma * (1.0 - ctx.R) * (1.0 - rho);
}

double from_hat(const TransformContext& ctx, double rho, double hat) {
    return flatten_weight(ctx, rho) * (hat - ctx.shift);
}

double to_hat(const TransformContext& ctx, double rho, double transformed) {
    return transformed / flatten_weight(ctx, rho) + ctx.shift;
}

HatPoint hats_at(const Parameters& p, double R, double rho, double uL, double uH, double uF,
                 const SchemeVariants& variants) {
    HatPoint s;
    s.Lhat = to_hat(make_context(Field::L, p, R, 0.0, variants), rho, uL);
    s.Hhat = to_hat(make_context(Field::H, p, R, 0.0, variants), rho, uH);
    s.Fhat = to_hat(make_context(Field::F, p, R, 0.0, variants), rho, uF);
    return s;
}

double diffusion_coeff(const TransformContext& ctx, const SchemeVariants& variants) {
    check_radius(ctx.R);
    const double om = 1.0 - ctx.R;
    return ctx.diff / (variants.diffusion_first_power ? om : om * om);
}

double fixed_drift(const TransformContext& ctx, double rho, double v_at_rho,
                   const SchemeVariants& variants) {
    check_radius(ctx.R);
    const double om = 1.0 - ctx.R;
    // Curvature term -2 diff / ((1-R)(rho(1-R)+R)); strictly finite on
    // [0,1] because rho(1-R)+R >= R > 0.
    const double radial = rho * om * om + ctx.R * om;
    double g = -2.0 * ctx.diff / radial;
    const double denom = variants.radius_drift_squared ? om * om : om;
    g += ctx.Rdot * (rho - 1.0) / denom;
    if (ctx.field == Field::F) g += v_at_rho / om;
    return g;
}

double drift_G(const TransformContext& ctx, double rho, double v_ext_at_rho,
               const SchemeVariants& variants) {
    return fixed_drift(ctx, rho, v_ext_at_rho, variants) +
           2.0 * diffusion_coeff(ctx, variants) * weight_slope(ctx, rho);
}

double transformed_reaction(const TransformContext& ctx, const Parameters& p, double rho,
                            double uL, double uH, double uF, double v_ext_at_rho,
                            const SchemeVariants& variants) {
    const HatPoint hats = hats_at(p, ctx.R, rho, uL, uH, uF, variants);
    const double fhat = reaction_hat(ctx.field, p, hats);

    const double w = flatten_weight(ctx, rho);
    const double s = weight_slope(ctx, rho);
    const double sg = ctx.slope_sign;
    const double a = diffusion_coeff(ctx, variants);
    const double b = fixed_drift(ctx, rho, v_ext_at_rho, variants);
    const double d = 1.0 - rho;
    const double coeff = sg * 0.5 * ctx.gamma * ctx.Rdot * d * d + b * s + a * s * s +
                         sg * a * ctx.gamma * (1.0 - ctx.R);

    double u = uL;
    if (ctx.field == Field::H) u = uH;
    if (ctx.field == Field::F) u = uF;
    return w * fhat + coeff * u;
}

} // namespace plaque
