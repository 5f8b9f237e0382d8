#pragma once

#include "iaw/params.hpp"
#include "iaw/series.hpp"

namespace iaw {

// The scaled-system state written as a truncated series in the expansion
// parameter. density_ratio is n/n_bar (leading coefficient identically 1);
// velocity and potential start at order one. Coefficients are time jets, so
// the residual assembly below can take the time derivatives it needs without
// ever finite-differencing in time.
struct ExpansionSeries {
    EpsSeries<TimeJet> density_ratio;
    EpsSeries<TimeJet> velocity;
    EpsSeries<TimeJet> potential;
};

// Order-by-order residuals of the scaled ion Euler / Boltzmann-Poisson system
// under the formal expansion:
//   mass_k     : coefficient k of  eps*dt(nu) - V*dx(nu) + dx(nu*u)
//   momentum_k : coefficient k of  eps*dt(u) - V*dx(u) + u*dx(u)
//                + (T_i/M)*dx(nu)/nu + (e/M)*dx(phi)
//   poisson_k  : coefficient k of  eps*dxx(phi) - 4 pi e n_bar (e^{kappa phi} - nu)
// The order-0 coefficients vanish identically; solving profile k makes the
// order-k coefficients of all three vanish.
struct ResidualSeries {
    EpsSeries<TimeJet> mass;
    EpsSeries<TimeJet> momentum;
    EpsSeries<TimeJet> poisson;
};

ResidualSeries ep_residual_series(const ExpansionSeries& state, const PhysParams& p);

// Poisson residual series over plain fields (no time derivatives occur in it).
// Used at high truncation order by the remainder diagnostics.
EpsSeries<GridField> poisson_residual_series(const EpsSeries<GridField>& density_ratio,
                                             const EpsSeries<GridField>& potential,
                                             const PhysParams& p);

// Convenience: series of zero jets with leading density coefficient 1.
ExpansionSeries empty_expansion(const Grid& g, int trunc_order, int jet_order);

} // namespace iaw
