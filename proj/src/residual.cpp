#include "iaw/residual.hpp"

namespace iaw {

namespace {

EpsSeries<TimeJet> series_jet_dx(const EpsSeries<TimeJet>& a, int order) {
    EpsSeries<TimeJet> out;
    out.c.reserve(a.c.size());
    for (const TimeJet& ck : a.c) out.c.push_back(jet_dx(ck, order));
    return out;
}

void require_expansion_shape(const ExpansionSeries& st) {
    const TimeJet& nu0 = st.density_ratio[0];
    TimeJet lead_err = jet_sub(nu0, TimeJet::constant(nu0.grid(), 1.0, nu0.order()));
    if (!jet_is_zero(lead_err))
        throw param_error("ep_residual_series: density_ratio must have leading coefficient 1");
    if (!jet_is_zero(st.velocity[0]) || !jet_is_zero(st.potential[0]))
        throw param_error("ep_residual_series: velocity/potential must start at order one");
}

} // namespace

ExpansionSeries empty_expansion(const Grid& g, int trunc_order, int jet_order) {
    ExpansionSeries st;
    for (int k = 0; k <= trunc_order; ++k) {
        st.density_ratio.c.push_back(TimeJet::zeros(g, jet_order));
        st.velocity.c.push_back(TimeJet::zeros(g, jet_order));
        st.potential.c.push_back(TimeJet::zeros(g, jet_order));
    }
    st.density_ratio[0] = TimeJet::constant(g, 1.0, jet_order);
    return st;
}

ResidualSeries ep_residual_series(const ExpansionSeries& state, const PhysParams& p) {
    const auto& nu = state.density_ratio;
    const auto& u = state.velocity;
    const auto& phi = state.potential;
    require_same_series_shape(nu, u, "ep_residual_series");
    require_same_series_shape(nu, phi, "ep_residual_series");
    require_expansion_shape(state);
    const int K = nu.trunc_order();
    const double V = p.wave_speed;
    const Grid& g = nu[0].grid();

    auto dnu = series_jet_dx(nu, 1);
    // nu_0 == 1, so its derivative is identically zero; substituting the exact
    // zero keeps the order-0 residuals bit-exact instead of FFT-roundoff small.
    dnu[0] = TimeJet::zeros(g, nu[0].order());
    const auto du = series_jet_dx(u, 1);
    const auto dphi = series_jet_dx(phi, 1);
    const auto flux = series_mul(nu, u);         // nu*u
    const auto advec = series_mul(u, du);        // u*dx(u)
    const auto logdx = series_div_unit(dnu, nu); // dx(nu)/nu
    // same left-nested projected exponential as the direct solver
    const auto boltz = series_exp_nested(series_scale(phi, p.boltzmann_kappa()));

    ResidualSeries res;
    const int zero_order = nu[0].order();
    res.mass.c.push_back(TimeJet::zeros(g, zero_order));
    res.momentum.c.push_back(TimeJet::zeros(g, zero_order));
    res.poisson.c.push_back(TimeJet::zeros(g, zero_order));
    for (int k = 1; k <= K; ++k) {
        TimeJet m = jet_add(jet_scale(dnu[k], -V), jet_dx(flux[k], 1));
        m = jet_add(m, jet_dt(nu[k - 1]));
        res.mass.c.push_back(std::move(m));

        TimeJet q = jet_add(jet_scale(du[k], -V), advec[k]);
        q = jet_add(q, jet_scale(logdx[k], p.T_i / p.mass_M));
        q = jet_add(q, jet_scale(dphi[k], p.e_charge / p.mass_M));
        q = jet_add(q, jet_dt(u[k - 1]));
        res.momentum.c.push_back(std::move(q));

        TimeJet pr = jet_scale(jet_sub(boltz[k], nu[k]), -p.poisson_scale());
        pr = jet_add(pr, jet_dx(phi[k - 1], 2));
        res.poisson.c.push_back(std::move(pr));
    }
    return res;
}

EpsSeries<GridField> poisson_residual_series(const EpsSeries<GridField>& density_ratio,
                                             const EpsSeries<GridField>& potential,
                                             const PhysParams& p) {
    require_same_series_shape(density_ratio, potential, "poisson_residual_series");
    const int K = density_ratio.trunc_order();
    const auto boltz = series_exp_nested(series_scale(potential, p.boltzmann_kappa()));
    EpsSeries<GridField> res;
    for (int k = 0; k <= K; ++k) {
        GridField r = -p.poisson_scale() * (boltz[k] - density_ratio[k]);
        if (k >= 1) r += deriv(potential[k - 1], 2);
        res.c.push_back(std::move(r));
    }
    return res;
}

} // namespace iaw
