#pragma once

#include <functional>
#include <vector>

#include "iaw/field.hpp"
#include "iaw/params.hpp"

namespace iaw {

// Uniformly sampled trajectory of one evolved field.
struct KdvTrajectory {
    Grid grid;
    PhysParams params;
    std::vector<double> times;
    std::vector<GridField> states;

    int frames() const { return static_cast<int>(times.size()); }
    double dt_out() const { return frames() > 1 ? times[1] - times[0] : 0.0; }
    const GridField& at(int i) const { return states[static_cast<size_t>(i)]; }
    // Cubic (4-point Lagrange) interpolation in time; clamped at the ends.
    GridField interp(double t) const;
    // Dispersive-phase-coherent interpolation: each Fourier mode is
    // interpolated with the free phase exp(i d xi^3 t) removed, so radiation
    // oscillating at the dispersion rate is sampled accurately even when
    // dt_out * d xi^3 is order one. The right sampler for every field that
    // evolves under the dispersive operator.
    GridField interp_phase(double t) const;
    bool covers(double t) const;
};

// Supplies the inhomogeneous forcing of a linearized solve at arbitrary times
// inside [0, tau].
using ForcingSupplier = std::function<GridField(double)>;

// Leading-profile equation  dt(n) + V n dx(n) + dispersion * dxxx(n) = 0,
// integrated by a 4th-order exponential (integrating-factor) scheme with the
// third derivative treated exactly in Fourier space and the advection term in
// conservative form (V/2) dx(n^2).
KdvTrajectory solve_kdv(const GridField& n1_0, double tau, const PhysParams& p, double dt,
                        int out_every);

// Higher-profile equation  dt(n) + V dx(n1 * n) + dispersion * dxxx(n) = G(t).
// n1 and G are sampled on the scheme's internal stage times by cubic
// interpolation.
KdvTrajectory solve_linearized_kdv(const GridField& nk_0, const ForcingSupplier& forcing,
                                   const KdvTrajectory& n1_traj, double tau, const PhysParams& p,
                                   double dt, int out_every);

// Right-hand side dt(n) rearranged from the evolution equations; the
// time-derivative supplier used by the expansion machinery. Pass forcing =
// nullptr for no forcing and n1 = nullptr for the leading (self-advected)
// profile.
GridField kdv_time_derivative(const GridField& n, const GridField* forcing, const GridField* n1,
                              const PhysParams& p);

// Conserved functionals of the leading-profile equation: mass, int n^2, and
// int (V n^3/6 - (dispersion/2) (dx n)^2). The energy form is the unique
// cubic+gradient combination with vanishing time derivative.
struct KdvInvariants {
    double mass = 0.0;
    double momentum = 0.0;
    double energy = 0.0;
};
KdvInvariants kdv_invariants(const GridField& n, const PhysParams& p);

// Exact traveling-wave profile (3c/V) sech^2( sqrt(c/dispersion)/2 * (x - center) ),
// translating at speed c.
GridField kdv_soliton(const Grid& g, const PhysParams& p, double speed, double center);

// max |f| on the two cells next to the periodic seam, relative to max |f|;
// decay diagnostic for the whole-line surrogate.
double boundary_ratio(const GridField& f);

} // namespace iaw
