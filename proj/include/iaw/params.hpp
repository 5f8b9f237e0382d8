#pragma once

#include "iaw/errors.hpp"

namespace iaw {

// Physical constants of the ion-acoustic model plus derived wave data.
// All immutable after make_params.
struct PhysParams {
    double e_charge = 1.0; // electron charge (> 0)
    double mass_M = 1.0;   // ion mass (> 0)
    double T_i = 0.0;      // ion temperature (>= 0; 0 = cold ions)
    double T_e = 1.0;      // electron temperature (> 0)
    double n_bar = 1.0;    // equilibrium electron density (> 0)

    // Derived: long-wave speed, V^2 = (T_i + T_e) / M.
    double wave_speed = 0.0;
    // Derived: KdV dispersion coefficient. Equals (V/2) * lambda_D^2 *
    // T_e/(T_i+T_e) with lambda_D^2 = T_e/(4 pi n_bar e^2); the e^2 is what
    // the order-by-order expansion of the scaled system produces.
    double dispersion = 0.0;

    double boltzmann_kappa() const { return e_charge / T_e; }
    // 4*pi*e*n_bar, the Poisson coupling scale.
    double poisson_scale() const;
    // T_e / (4 pi e n_bar M): weight of d/dx(Poisson eq) in the combination
    // that produces the evolution equation of each expansion profile.
    double poisson_weight() const;
};

PhysParams make_params(double e_charge, double mass_M, double T_i, double T_e, double n_bar);

// Named normalizations used throughout the tests: all constants 1 and
// n_bar = 1/(4 pi e), so V = sqrt(2) (warm, T_i = 1) or V = 1 (cold, T_i = 0).
PhysParams warm_preset();
PhysParams cold_preset();

// Determinant of the 3x3 acoustic coefficient matrix
//   [  V      -1      0     ]
//   [ T_i/M   -V     e/M    ]
//   [  1       0   -e/T_e   ]
// evaluated at a trial wave speed. Vanishes exactly when
// V_trial^2 = (T_i + T_e)/M.
double acoustic_determinant(double v_trial, const PhysParams& p);

} // namespace iaw
