#include "plaque/model.hpp"

#include <cmath>
#include <string>

namespace plaque {

namespace {

// Denominator guards.  Each expression checks only the denominators it
// actually contains, so evaluating one field never trips on another's
// singularity.
void check_hdl_offset(const Parameters& p, double Hhat) {
    if (std::abs(p.delta + Hhat) < 1e-12 * std::max(1.0, std::abs(p.delta)))
        throw SingularDenominator("velocity production denominator delta+H vanished");
}

double ingestion_term(const Parameters& p, const HatPoint& s) {
    const double den = p.K1 + s.Lhat;
    if (den <= 0.0) throw SingularDenominator("ingestion denominator K1+L not positive");
    return p.k1 * (p.M0 - s.Fhat) * s.Lhat / den;
}

double clearance_term(const Parameters& p, const HatPoint& s) {
    const double den = p.K2 + s.Fhat;
    if (den <= 0.0) throw SingularDenominator("clearance denominator K2+F not positive");
    return p.k2 * s.Hhat * s.Fhat / den;
}

} // namespace

const char* field_name(Field f) {
    switch (f) {
    case Field::L: return "L";
    case Field::H: return "H";
    default: return "F";
    }
}

double reaction_hat(Field field, const Parameters& p, const HatPoint& s) {
    switch (field) {
    case Field::L:
        return -ingestion_term(p, s) - p.r1 * s.Lhat;
    case Field::H:
        return -clearance_term(p, s) - p.r2 * s.Hhat;
    case Field::F: {
        check_hdl_offset(p, s.Hhat);
        const double recruit =
            p.lambda * s.Fhat * (p.M0 - s.Fhat) * s.Lhat / (p.M0 * (p.delta + s.Hhat));
        return ingestion_term(p, s) - clearance_term(p, s) - recruit +
               (p.mu1 / p.M0) * (p.M0 - s.Fhat) * s.Fhat -
               (p.mu2 / p.M0) * s.Fhat * (p.M0 - s.Fhat);
    }
    }
    return 0.0;
}

double velocity_rhs(const Parameters& p, const HatPoint& s) {
    check_hdl_offset(p, s.Hhat);
    return (p.lambda * (p.M0 - s.Fhat) * s.Lhat / (p.delta + s.Hhat) -
            p.mu1 * (p.M0 - s.Fhat) - p.mu2 * s.Fhat) /
           p.M0;
}

ValidationReport validate_params(const Parameters& p) {
    ValidationReport r;
    auto positive = [&r](double v, const char* name) {
        if (!(v > 0.0)) r.violations.push_back(std::string(name) + " must be positive");
    };
    positive(p.k1, "k1");
    positive(p.k2, "k2");
    positive(p.K1, "K1");
    positive(p.K2, "K2");
    positive(p.D, "D");
    positive(p.mu1, "mu1");
    positive(p.mu2, "mu2");
    positive(p.r1, "r1");
    positive(p.r2, "r2");
    positive(p.lambda, "lambda");
    positive(p.M0, "M0");
    positive(p.T, "T");
    if (!(p.epsilon > 0.0 && p.epsilon < 1.0)) r.violations.push_back("epsilon outside (0,1)");
    if (p.alpha < 0.0) r.violations.push_back("alpha must be nonnegative");
    if (p.beta < 0.0) r.violations.push_back("beta must be nonnegative");
    if (p.L0 < 0.0) r.violations.push_back("L0 must be nonnegative");
    if (p.H0 < 0.0) r.violations.push_back("H0 must be nonnegative");
    if (p.F0 < 0.0 || p.F0 > p.M0) r.violations.push_back("F0 outside [0, M0]");

    if (p.delta + p.H0 < 0.0)
        r.warnings.push_back("delta + H0 is negative: velocity production term starts negative");
    if (std::abs(p.delta + p.H0) < 1e-12 * std::max(1.0, std::abs(p.delta)))
        r.violations.push_back("delta + H0 vanishes: velocity law singular at the initial state");
    return r;
}

} // namespace plaque
