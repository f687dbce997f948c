#pragma once

#include "plaque/errors.hpp"

namespace plaque {

enum class Field { L, H, F };

const char* field_name(Field f);

// Physical constants of the plaque-growth model.  Concentrations are in
// g/cm^3, rates in 1/day, lengths in cm (vessel radius normalized to 1).
struct Parameters {
    double k1 = 10.0;       // LDL ingestion rate, 1/day
    double k2 = 10.0;       // HDL reverse-transport rate, 1/day
    double K1 = 1e-2;       // LDL half-saturation, g/cm^3
    double K2 = 0.5;        // foam-cell half-saturation, g/cm^3
    double D = 8.64e-7;     // foam-cell diffusion, cm^2/day
    double mu1 = 0.015;     // macrophage death rate, 1/day
    double mu2 = 0.03;      // foam-cell death rate, 1/day
    double r1 = 2.42e-5;    // LDL radical degradation, 1/day
    double r2 = 5.45e-7;    // HDL radical degradation, 1/day
    double lambda = 2.573e-3; // monocyte recruitment coefficient, 1/day
    double delta = -2.541e-3; // HDL offset in the velocity law, g/cm^3
    double M0 = 5e-5;       // reference macrophage density, g/cm^3
    double alpha = 1.0;     // LDL/HDL boundary transfer, 1/cm
    double beta = 0.01;     // foam-cell boundary transfer, 1/cm
    double L0 = 14e-4;      // serum LDL, g/cm^3
    double H0 = 6e-4;       // serum HDL, g/cm^3
    double F0 = 0.0;        // initial foam-cell density, g/cm^3
    double epsilon = 0.9;   // initial interface radius, cm
    double T = 60.0;        // simulation horizon, days
};

// Untransformed concentrations at one space-time point.
struct HatPoint {
    double Lhat = 0.0;
    double Hhat = 0.0;
    double Fhat = 0.0;
};

// Reaction right-hand side of the chosen field's transport equation,
// evaluated in the untransformed variables.
double reaction_hat(Field field, const Parameters& p, const HatPoint& s);

// Radial tissue velocity v_r produced by local volume change:
// [lambda (M0-F) L / (delta+H) - mu1 (M0-F) - mu2 F] / M0.
double velocity_rhs(const Parameters& p, const HatPoint& s);

ValidationReport validate_params(const Parameters& p);

} // namespace plaque
