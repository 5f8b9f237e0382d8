#include "iaw/kdv.hpp"

#include <cmath>
#include <complex>

#include "iaw/fft.hpp"
#include "iaw/spectral.hpp"

namespace iaw {

namespace {

using Cvec = std::vector<std::complex<double>>;

Cvec fft_of(const GridField& f) {
    Cvec s;
    SpectralWorkspace::get(f.grid.n_points).forward(f.v, s);
    return s;
}

GridField ifft_to_field(const Grid& g, const Cvec& s) {
    GridField out(g);
    SpectralWorkspace::get(g.n_points).inverse(s, out.v);
    return out;
}

// phi-function coefficients of the exponential scheme, evaluated by averaging
// over a unit circle around each h*L(xi); the integrands are entire, so the
// circle mean equals the value at the center while staying well conditioned
// near z = 0 (Kassam-Trefethen style).
struct EtdCoeffs {
    Cvec E, E2, Q, f1, f2, f3;
};

EtdCoeffs etd_coeffs(const Grid& g, double dispersion, double h) {
    const int n_modes = g.n_points / 2 + 1;
    EtdCoeffs c;
    c.E.resize(n_modes);
    c.E2.resize(n_modes);
    c.Q.assign(n_modes, 0.0);
    c.f1.assign(n_modes, 0.0);
    c.f2.assign(n_modes, 0.0);
    c.f3.assign(n_modes, 0.0);
    const int M = 64;
    for (int m = 0; m < n_modes; ++m) {
        const double xi = g.wavenumber(m);
        // dt(n) = -dispersion * dxxx(n) + ... => L = -dispersion*(i xi)^3
        const std::complex<double> L(0.0, dispersion * xi * xi * xi);
        const std::complex<double> z0 = h * L;
        c.E[m] = std::exp(z0);
        c.E2[m] = std::exp(0.5 * z0);
        std::complex<double> q = 0.0, a = 0.0, b = 0.0, cc = 0.0;
        for (int j = 0; j < M; ++j) {
            const double th = M_PI * (j + 0.5) / M * 2.0;
            const std::complex<double> z = z0 + std::polar(1.0, th);
            const std::complex<double> ez = std::exp(z), z2 = z * z, z3 = z2 * z;
            q += (std::exp(0.5 * z) - 1.0) / z;
            a += (-4.0 - z + ez * (4.0 - 3.0 * z + z2)) / z3;
            b += (2.0 + z + ez * (-2.0 + z)) / z3;
            cc += (-4.0 - 3.0 * z - z2 + ez * (4.0 - z)) / z3;
        }
        const double w = h / M;
        c.Q[m] = q * w;
        c.f1[m] = a * w;
        c.f2[m] = b * w;
        c.f3[m] = cc * w;
    }
    return c;
}

struct StepCounts {
    int steps;
    double dt_eff;
};

StepCounts plan_steps(double tau, double dt, int out_every) {
    if (!(tau > 0.0)) throw param_error("solve: tau must be > 0");
    if (!(dt > 0.0)) throw param_error("solve: dt must be > 0");
    if (out_every < 1) throw param_error("solve: out_every must be >= 1");
    int steps = static_cast<int>(std::ceil(tau / dt - 1e-9));
    steps = std::max(steps, out_every);
    if (steps % out_every != 0) steps += out_every - steps % out_every;
    return {steps, tau / steps};
}

void check_finite_spec(const Cvec& s, double t) {
    for (const auto& c : s)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw integration_error("kdv solve blew up at t = " + std::to_string(t));
}

// Generic exponential RK4 driver; nonlin(spec_in, t, spec_out) must return the
// transformed nonlinear term N(v, t).
template <class NonlinFn>
KdvTrajectory etd_run(const GridField& v0, double tau, const PhysParams& p, double dt,
                      int out_every, NonlinFn&& nonlin) {
    const Grid g = v0.grid;
    const auto [steps, h] = plan_steps(tau, dt, out_every);
    const EtdCoeffs cf = etd_coeffs(g, p.dispersion, h);
    const int n_modes = g.n_points / 2 + 1;

    KdvTrajectory traj;
    traj.grid = g;
    traj.params = p;
    traj.times.push_back(0.0);
    traj.states.push_back(dealias(v0));

    Cvec v = fft_of(traj.states.back());
    Cvec Nv(n_modes), Na(n_modes), Nb(n_modes), Nc(n_modes), a(n_modes), b(n_modes), c(n_modes);
    for (int s = 0; s < steps; ++s) {
        const double t = s * h;
        nonlin(v, t, Nv);
        for (int m = 0; m < n_modes; ++m) a[m] = cf.E2[m] * v[m] + cf.Q[m] * Nv[m];
        nonlin(a, t + 0.5 * h, Na);
        for (int m = 0; m < n_modes; ++m) b[m] = cf.E2[m] * v[m] + cf.Q[m] * Na[m];
        nonlin(b, t + 0.5 * h, Nb);
        for (int m = 0; m < n_modes; ++m) c[m] = cf.E2[m] * a[m] + cf.Q[m] * (2.0 * Nb[m] - Nv[m]);
        nonlin(c, t + h, Nc);
        for (int m = 0; m < n_modes; ++m)
            v[m] = cf.E[m] * v[m] + cf.f1[m] * Nv[m] + 2.0 * cf.f2[m] * (Na[m] + Nb[m]) + cf.f3[m] * Nc[m];
        if ((s + 1) % out_every == 0) {
            check_finite_spec(v, (s + 1) * h);
            traj.times.push_back((s + 1) * h);
            traj.states.push_back(ifft_to_field(g, v));
        }
    }
    return traj;
}

} // namespace

GridField KdvTrajectory::interp(double t) const {
    const int nf = frames();
    if (nf == 1) return states[0];
    const double h = dt_out();
    double s = (t - times[0]) / h;
    int i = static_cast<int>(std::floor(s));
    i = std::max(0, std::min(i, nf - 2));
    int j0 = std::max(0, std::min(i - 1, nf - 4));
    const double u = s - j0;
    GridField out = zero_field(grid);
    for (int j = 0; j < 4; ++j) {
        double w = 1.0;
        for (int k = 0; k < 4; ++k)
            if (k != j) w *= (u - k) / (j - k);
        axpy(out, w, states[static_cast<size_t>(j0 + j)]);
    }
    return out;
}

GridField KdvTrajectory::interp_phase(double t) const {
    const int nf = frames();
    if (nf == 1) return states[0];
    const double h = dt_out();
    double s = (t - times[0]) / h;
    int i = static_cast<int>(std::floor(s));
    i = std::max(0, std::min(i, nf - 2));
    const int j0 = std::max(0, std::min(i - 1, nf - 4));
    const double u = s - j0;
    auto& ws = SpectralWorkspace::get(grid.n_points);
    const int n_modes = ws.n_modes();
    Cvec acc(static_cast<size_t>(n_modes), 0.0);
    Cvec spec;
    for (int j = 0; j < 4; ++j) {
        double w = 1.0;
        for (int k = 0; k < 4; ++k)
            if (k != j) w *= (u - k) / (j - k);
        const double tj = times[static_cast<size_t>(j0 + j)];
        ws.forward(states[static_cast<size_t>(j0 + j)].v, spec);
        for (int m = 0; m < n_modes; ++m) {
            const double xi = grid.wavenumber(m);
            // remove exp(L t_j), L = i * dispersion * xi^3
            const std::complex<double> ph = std::polar(1.0, -params.dispersion * xi * xi * xi * tj);
            acc[static_cast<size_t>(m)] += w * spec[static_cast<size_t>(m)] * ph;
        }
    }
    for (int m = 0; m < n_modes; ++m) {
        const double xi = grid.wavenumber(m);
        acc[static_cast<size_t>(m)] *= std::polar(1.0, params.dispersion * xi * xi * xi * t);
    }
    GridField out(grid);
    ws.inverse(acc, out.v);
    return out;
}

bool KdvTrajectory::covers(double t) const {
    return !times.empty() && t >= times.front() - 1e-12 && t <= times.back() + 1e-12;
}

KdvTrajectory solve_kdv(const GridField& n1_0, double tau, const PhysParams& p, double dt,
                        int out_every) {
    const Grid g = n1_0.grid;
    auto& ws = SpectralWorkspace::get(g.n_points);
    const double half_V = 0.5 * p.wave_speed;
    std::vector<double> work;
    auto nonlin = [&](const Cvec& spec, double, Cvec& out) {
        ws.inverse(spec, work);
        for (double& x : work) x = x * x;
        GridField sq(g, work);
        dealias_in_place(sq);
        ws.forward(sq.v, out);
        for (int m = 0; m < ws.n_modes(); ++m) {
            const double xi = g.wavenumber(m);
            out[m] *= std::complex<double>(0.0, -half_V * xi);
        }
        if (g.n_points % 2 == 0) out[static_cast<size_t>(g.n_points / 2)] = 0.0;
    };
    return etd_run(n1_0, tau, p, dt, out_every, nonlin);
}

KdvTrajectory solve_linearized_kdv(const GridField& nk_0, const ForcingSupplier& forcing,
                                   const KdvTrajectory& n1_traj, double tau, const PhysParams& p,
                                   double dt, int out_every) {
    const Grid g = nk_0.grid;
    if (!n1_traj.covers(0.0) || !n1_traj.covers(tau))
        throw hierarchy_error("solve_linearized_kdv: leading-profile trajectory does not cover [0, tau]");
    auto& ws = SpectralWorkspace::get(g.n_points);
    const double V = p.wave_speed;
    std::vector<double> work;
    auto nonlin = [&](const Cvec& spec, double t, Cvec& out) {
        ws.inverse(spec, work);
        GridField prod = n1_traj.interp_phase(t);
        for (int j = 0; j < g.n_points; ++j) prod[j] *= work[static_cast<size_t>(j)];
        dealias_in_place(prod);
        ws.forward(prod.v, out);
        for (int m = 0; m < ws.n_modes(); ++m) {
            const double xi = g.wavenumber(m);
            out[m] *= std::complex<double>(0.0, -V * xi);
        }
        if (g.n_points % 2 == 0) out[static_cast<size_t>(g.n_points / 2)] = 0.0;
        if (forcing) {
            GridField G = forcing(t);
            require_same_grid(G, nk_0, "solve_linearized_kdv forcing");
            Cvec gs;
            ws.forward(G.v, gs);
            for (int m = 0; m < ws.n_modes(); ++m) out[m] += gs[m];
        }
    };
    return etd_run(nk_0, tau, p, dt, out_every, nonlin);
}

GridField kdv_time_derivative(const GridField& n, const GridField* forcing, const GridField* n1,
                              const PhysParams& p) {
    GridField rhs = (-p.dispersion) * deriv(n, 3);
    if (n1) {
        require_same_grid(*n1, n, "kdv_time_derivative");
        rhs -= p.wave_speed * deriv(dealias(*n1 * n), 1);
    } else {
        rhs -= (0.5 * p.wave_speed) * deriv(dealias(n * n), 1);
    }
    if (forcing) {
        require_same_grid(*forcing, n, "kdv_time_derivative");
        rhs += *forcing;
    }
    return rhs;
}

KdvInvariants kdv_invariants(const GridField& n, const PhysParams& p) {
    KdvInvariants inv;
    const double dx = n.grid.dx();
    double m = 0.0, q = 0.0, e3 = 0.0;
    for (double x : n.v) {
        m += x;
        q += x * x;
        e3 += x * x * x;
    }
    GridField dn = deriv(n, 1);
    double grad = 0.0;
    for (double x : dn.v) grad += x * x;
    inv.mass = m * dx;
    inv.momentum = q * dx;
    inv.energy = (p.wave_speed / 6.0) * e3 * dx - 0.5 * p.dispersion * grad * dx;
    return inv;
}

GridField kdv_soliton(const Grid& g, const PhysParams& p, double speed, double center) {
    if (!(speed > 0.0)) throw param_error("kdv_soliton: speed must be > 0");
    const double amp = 3.0 * speed / p.wave_speed;
    const double width = 0.5 * std::sqrt(speed / p.dispersion);
    return sample(g, [&](double x) {
        const double s = 1.0 / std::cosh(width * (x - center));
        return amp * s * s;
    });
}

double boundary_ratio(const GridField& f) {
    const int n = f.grid.n_points;
    const double m = max_abs(f);
    if (m == 0.0) return 0.0;
    double b = std::max(std::fabs(f[0]), std::fabs(f[n - 1]));
    b = std::max(b, std::fabs(f[1]));
    b = std::max(b, std::fabs(f[n - 2]));
    return b / m;
}

} // namespace iaw
