#pragma once

#include <vector>

#include "iaw/field.hpp"
#include "iaw/params.hpp"

namespace iaw {

// Full scaled-system state at one instant and one value of the expansion
// parameter. Density is in absolute units (equilibrium value n_bar).
struct EpState {
    GridField n, u, phi;
    double t = 0.0;
    double eps = 0.0;
};

struct PoissonOptions {
    // Newton stops when the sup-norm residual is below tol * 4 pi e n_bar.
    double tol = 1e-12;
    int max_newton = 50;
    // When set, receives the residual sup-norm after each Newton iteration.
    std::vector<double>* residual_log = nullptr;
};

// Solves eps * dxx(phi) = 4 pi e (n_bar e^{e phi / T_e} - n) by Newton
// iteration; each linear step is solved by conjugate gradients with the
// mean-coefficient Helmholtz operator inverted spectrally as preconditioner.
GridField poisson_solve(const GridField& n, double eps, const PhysParams& p,
                        const GridField* phi_guess = nullptr, const PoissonOptions& opts = {});

// Sup-norm of the discrete Poisson residual of a state.
double poisson_residual(const EpState& s, const PhysParams& p);

// Time derivatives of (n, u) from the scaled system, with phi taken from the
// state (assumed consistent with n):
//   dn = [V dx(n) - dx(n u)] / eps
//   du = [V dx(u) - u dx(u) - (T_i/M) dx(n)/n - (e/M) dx(phi)] / eps
struct EpRhs {
    GridField dn, du;
};
EpRhs ep_rhs(const EpState& s, const PhysParams& p);

struct EpOptions {
    double cfl_safety = 0.25;
    bool enforce_cfl = true;
    PoissonOptions poisson;
};

// Admissible step bound cfl_safety * eps * dx / (2V + max|u|): the fast
// left-moving acoustic family travels at O(1/eps) in this frame.
double ep_cfl_dt(const EpState& s, const PhysParams& p, double cfl_safety);

struct EpTrajectory {
    PhysParams params;
    double eps = 0.0;
    std::vector<double> times;
    std::vector<EpState> states;
    int frames() const { return static_cast<int>(times.size()); }
};

// Classical explicit RK4 on (n, u) with the potential re-solved at every
// stage. Fails loudly (naming the time) on positivity loss, CFL violation or
// elliptic breakdown. dt may be negative for reverse integration.
EpTrajectory ep_solve(const EpState& initial, double tau, double dt, int out_every,
                      const PhysParams& p, const EpOptions& opts = {});

} // namespace iaw
