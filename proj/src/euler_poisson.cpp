#include "iaw/euler_poisson.hpp"

#include <cmath>
#include <string>

#include "iaw/fft.hpp"
#include "iaw/spectral.hpp"

namespace iaw {

namespace {

// exp(kappa phi) as the left-nested projected power sum: each power is
// dealiased before the next multiplication, matching the expansion
// machinery's exponential exactly (the 2/3 rule applied to the Boltzmann
// nonlinearity like to every other product in the solvers). The stored
// scaled powers feed the exact Jacobian below.
struct BoltzmannEval {
    GridField value;               // exp(kappa phi), without the n_bar factor
    std::vector<GridField> powers; // (kappa phi)^(m) / m!, nested, m = 0..M
};

BoltzmannEval boltzmann_eval(const GridField& phi, const PhysParams& p) {
    const double kappa = p.boltzmann_kappa();
    const Grid& g = phi.grid;
    BoltzmannEval ev;
    ev.value = const_field(g, 1.0);
    ev.powers.push_back(ev.value);
    for (int m = 1; m <= 64; ++m) {
        GridField power = dealias(ev.powers.back() * phi);
        power *= kappa / m;
        ev.value += power;
        ev.powers.push_back(power);
        if (max_abs(power) <= 1e-18 * std::max(1.0, max_abs(ev.value)) && m >= 4) break;
        if (m == 64)
            throw elliptic_error("boltzmann_eval: potential amplitude too large");
    }
    return ev;
}

GridField boltzmann_density(const GridField& phi, const PhysParams& p) {
    return p.n_bar * boltzmann_eval(phi, p).value;
}

// Directional derivative of the nested exponential at the evaluation point:
// d/dphi [P_m] (x) = (kappa/m) * dealias(dP_{m-1} * phi + P_{m-1} * x).
GridField boltzmann_derivative(const BoltzmannEval& ev, const GridField& phi, const GridField& x,
                               const PhysParams& p) {
    const double kappa = p.boltzmann_kappa();
    const Grid& g = phi.grid;
    GridField acc = zero_field(g);
    GridField dP = zero_field(g);
    const int M = static_cast<int>(ev.powers.size()) - 1;
    for (int m = 1; m <= M; ++m) {
        GridField t = dP * phi;
        t += ev.powers[static_cast<size_t>(m - 1)] * x;
        dP = dealias(t);
        dP *= kappa / m;
        acc += dP;
    }
    return acc;
}

// eps*dxx(phi) - 4 pi e (n_bar e^{kappa phi} - n)
GridField poisson_residual_field(const GridField& phi, const GridField& n, double eps,
                                 const PhysParams& p) {
    GridField r = eps * deriv(phi, 2);
    GridField ne = boltzmann_density(phi, p);
    for (int j = 0; j < r.size(); ++j) r[j] -= 4.0 * M_PI * p.e_charge * (ne[j] - n[j]);
    return r;
}

// Solves (-eps*dxx + c_mean) z = r exactly in Fourier space.
GridField helmholtz_const_inverse(const GridField& r, double c_mean, double eps) {
    auto s = spectrum(r);
    const Grid& g = r.grid;
    for (int m = 0; m < static_cast<int>(s.size()); ++m) {
        const double xi = g.wavenumber(m);
        s[static_cast<size_t>(m)] /= (eps * xi * xi + c_mean);
    }
    return from_spectrum(g, s);
}

// Preconditioned CG for the exact Newton operator
//   A x = -eps*dxx(x) + 4 pi e n_bar * dB[x],
// which is symmetric positive definite on the dealiased band (all iterates
// stay in it). The mean-coefficient Helmholtz inverse preconditions.
GridField solve_newton_step(const GridField& b, const BoltzmannEval& ev, const GridField& phi,
                            double eps, const PhysParams& p, double rel_tol) {
    const Grid& g = b.grid;
    const double scale = p.poisson_scale();
    auto apply = [&](const GridField& x) {
        GridField out = (-eps) * deriv(x, 2);
        axpy(out, scale, boltzmann_derivative(ev, phi, x, p));
        return out;
    };
    GridField c_diag = ev.value; // pointwise coefficient for the preconditioner mean
    const double c_mean = scale * p.boltzmann_kappa() * mean(c_diag);
    GridField x = zero_field(g);
    GridField r = b;
    GridField z = helmholtz_const_inverse(r, c_mean, eps);
    GridField d = z;
    double rz = l2_inner(r, z);
    const double b_norm = l2_norm(b);
    if (b_norm == 0.0) return x;
    for (int it = 0; it < 300; ++it) {
        GridField ad = apply(d);
        const double alpha = rz / l2_inner(d, ad);
        axpy(x, alpha, d);
        axpy(r, -alpha, ad);
        if (l2_norm(r) <= rel_tol * b_norm) break;
        z = helmholtz_const_inverse(r, c_mean, eps);
        const double rz_new = l2_inner(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (int j = 0; j < d.size(); ++j) d[j] = z[j] + beta * d[j];
    }
    return x;
}

} // namespace

GridField poisson_solve(const GridField& n, double eps, const PhysParams& p,
                        const GridField* phi_guess, const PoissonOptions& opts) {
    if (!(eps > 0.0)) throw param_error("poisson_solve: eps must be > 0");
    if (min_value(n) <= 0.0) throw param_error("poisson_solve: density must be positive");
    const Grid& g = n.grid;
    const double res_scale = p.poisson_scale(); // 4 pi e n_bar
    const double target = opts.tol * res_scale;
    const double kappa = p.boltzmann_kappa();

    GridField phi = phi_guess ? *phi_guess : zero_field(g);
    if (phi_guess) require_same_grid(*phi_guess, n, "poisson_solve");

    (void)kappa;
    GridField res = poisson_residual_field(phi, n, eps, p);
    double res_norm = max_abs(res);
    if (opts.residual_log) opts.residual_log->push_back(res_norm);
    for (int it = 0; it < opts.max_newton; ++it) {
        if (res_norm <= target) return phi;
        BoltzmannEval ev = boltzmann_eval(phi, p);
        GridField step = solve_newton_step(res, ev, phi, eps, p, 1e-13);
        phi += step;
        require_finite(phi, "poisson_solve");
        res = poisson_residual_field(phi, n, eps, p);
        res_norm = max_abs(res);
        if (opts.residual_log) opts.residual_log->push_back(res_norm);
    }
    if (res_norm <= target) return phi;
    throw elliptic_error("poisson_solve: Newton failed to reach tolerance (residual " +
                         std::to_string(res_norm) + ")");
}

double poisson_residual(const EpState& s, const PhysParams& p) {
    return max_abs(poisson_residual_field(s.phi, s.n, s.eps, p));
}

EpRhs ep_rhs(const EpState& s, const PhysParams& p) {
    const double inv_eps = 1.0 / s.eps;
    const double V = p.wave_speed;
    GridField dn_x = deriv(s.n, 1);
    GridField du_x = deriv(s.u, 1);
    GridField dphi_x = deriv(s.phi, 1);

    GridField dn = V * dn_x - deriv(dealias(s.n * s.u), 1);
    dn *= inv_eps;

    GridField du = V * du_x - dealias(s.u * du_x);
    if (p.T_i != 0.0) {
        GridField pressure = pointwise_div(dn_x, s.n);
        axpy(du, -p.T_i / p.mass_M, pressure);
    }
    axpy(du, -p.e_charge / p.mass_M, dphi_x);
    du *= inv_eps;
    return {std::move(dn), std::move(du)};
}

double ep_cfl_dt(const EpState& s, const PhysParams& p, double cfl_safety) {
    const double speed = (2.0 * p.wave_speed + max_abs(s.u)) / s.eps;
    return cfl_safety * s.n.grid.dx() / speed;
}

EpTrajectory ep_solve(const EpState& initial, double tau, double dt, int out_every,
                      const PhysParams& p, const EpOptions& opts) {
    if (!(tau > 0.0)) throw param_error("ep_solve: tau must be > 0");
    if (dt == 0.0) throw param_error("ep_solve: dt must be nonzero");
    if (out_every < 1) throw param_error("ep_solve: out_every must be >= 1");
    const Grid& g = initial.n.grid;
    (void)g;
    const double direction = dt > 0.0 ? 1.0 : -1.0;
    int steps = static_cast<int>(std::ceil(tau / std::fabs(dt) - 1e-9));
    steps = std::max(steps, out_every);
    if (steps % out_every != 0) steps += out_every - steps % out_every;
    const double h = direction * tau / steps;

    EpState state = initial;
    if (state.eps <= 0.0) throw param_error("ep_solve: state eps must be > 0");
    state.phi = poisson_solve(state.n, state.eps, p, &state.phi, opts.poisson);

    EpTrajectory traj;
    traj.params = p;
    traj.eps = state.eps;
    traj.times.push_back(state.t);
    traj.states.push_back(state);

    GridField phi_prev = state.phi;
    auto stage_rhs = [&](const GridField& n, const GridField& u, double t) -> EpRhs {
        if (min_value(n) <= 0.0)
            throw integration_error("ep_solve: density positivity lost at t = " + std::to_string(t));
        EpState st{n, u, phi_prev, t, state.eps};
        st.phi = poisson_solve(n, state.eps, p, &phi_prev, opts.poisson);
        phi_prev = st.phi;
        return ep_rhs(st, p);
    };

    for (int s = 0; s < steps; ++s) {
        const double t = state.t;
        if (opts.enforce_cfl) {
            const double dt_max = ep_cfl_dt(state, p, opts.cfl_safety);
            if (std::fabs(h) > dt_max * (1.0 + 1e-12))
                throw integration_error("ep_solve: CFL violation at t = " + std::to_string(t) +
                                        " (dt " + std::to_string(std::fabs(h)) + " > " +
                                        std::to_string(dt_max) + ")");
        }
        EpRhs k1 = stage_rhs(state.n, state.u, t);
        GridField n2 = state.n, u2 = state.u;
        axpy(n2, 0.5 * h, k1.dn);
        axpy(u2, 0.5 * h, k1.du);
        EpRhs k2 = stage_rhs(n2, u2, t + 0.5 * h);
        GridField n3 = state.n, u3 = state.u;
        axpy(n3, 0.5 * h, k2.dn);
        axpy(u3, 0.5 * h, k2.du);
        EpRhs k3 = stage_rhs(n3, u3, t + 0.5 * h);
        GridField n4 = state.n, u4 = state.u;
        axpy(n4, h, k3.dn);
        axpy(u4, h, k3.du);
        EpRhs k4 = stage_rhs(n4, u4, t + h);

        axpy(state.n, h / 6.0, k1.dn);
        axpy(state.n, h / 3.0, k2.dn);
        axpy(state.n, h / 3.0, k3.dn);
        axpy(state.n, h / 6.0, k4.dn);
        axpy(state.u, h / 6.0, k1.du);
        axpy(state.u, h / 3.0, k2.du);
        axpy(state.u, h / 3.0, k3.du);
        axpy(state.u, h / 6.0, k4.du);
        state.t = t + h;

        if (!is_finite(state.n) || !is_finite(state.u))
            throw integration_error("ep_solve: blow-up at t = " + std::to_string(state.t));
        if (min_value(state.n) <= 0.0)
            throw integration_error("ep_solve: density positivity lost at t = " +
                                    std::to_string(state.t));
        state.phi = poisson_solve(state.n, state.eps, p, &phi_prev, opts.poisson);
        phi_prev = state.phi;

        if ((s + 1) % out_every == 0) {
            traj.times.push_back(state.t);
            traj.states.push_back(state);
        }
    }
    return traj;
}

} // namespace iaw
