#include "iaw/params.hpp"

#include <cmath>

namespace iaw {

double PhysParams::poisson_scale() const { return 4.0 * M_PI * e_charge * n_bar; }

double PhysParams::poisson_weight() const { return T_e / (4.0 * M_PI * e_charge * n_bar * mass_M); }

PhysParams make_params(double e_charge, double mass_M, double T_i, double T_e, double n_bar) {
    if (!(e_charge > 0.0)) throw param_error("make_params: e_charge must be > 0");
    if (!(mass_M > 0.0)) throw param_error("make_params: mass_M must be > 0");
    if (!(T_i >= 0.0)) throw param_error("make_params: T_i must be >= 0");
    if (!(T_e > 0.0)) throw param_error("make_params: T_e must be > 0");
    if (!(n_bar > 0.0)) throw param_error("make_params: n_bar must be > 0");
    PhysParams p;
    p.e_charge = e_charge;
    p.mass_M = mass_M;
    p.T_i = T_i;
    p.T_e = T_e;
    p.n_bar = n_bar;
    p.wave_speed = std::sqrt((T_i + T_e) / mass_M);
    p.dispersion = T_e * T_e / (8.0 * M_PI * e_charge * e_charge * n_bar * mass_M * p.wave_speed);
    return p;
}

PhysParams warm_preset() { return make_params(1.0, 1.0, 1.0, 1.0, 1.0 / (4.0 * M_PI)); }

PhysParams cold_preset() { return make_params(1.0, 1.0, 0.0, 1.0, 1.0 / (4.0 * M_PI)); }

double acoustic_determinant(double v_trial, const PhysParams& p) {
    const double a11 = v_trial, a12 = -1.0, a13 = 0.0;
    const double a21 = p.T_i / p.mass_M, a22 = -v_trial, a23 = p.e_charge / p.mass_M;
    const double a31 = 1.0, a32 = 0.0, a33 = -p.e_charge / p.T_e;
    return a11 * (a22 * a33 - a23 * a32) - a12 * (a21 * a33 - a23 * a31) + a13 * (a21 * a32 - a22 * a31);
}

} // namespace iaw
