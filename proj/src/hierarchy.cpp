#include "iaw/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "iaw/spectral.hpp"

namespace iaw {

namespace {

// dt(n) for stage k as a jet expression: forcing - V dx(n1*n) - d dxxx(n) for
// k >= 2, or -(V/2) dx(n^2) - d dxxx(n) for the leading profile.
TimeJet rhs_jet(const TimeJet& n, const TimeJet* n1, const TimeJet* forcing, const PhysParams& p) {
    TimeJet rhs = jet_scale(jet_dx(n, 3), -p.dispersion);
    if (n1) {
        rhs = jet_add(rhs, jet_scale(jet_dx(jet_dealias(jet_mul(*n1, n)), 1), -p.wave_speed));
    } else {
        rhs = jet_add(rhs, jet_scale(jet_dx(jet_dealias(jet_mul(n, n)), 1), -0.5 * p.wave_speed));
    }
    if (forcing) rhs = jet_add(rhs, *forcing);
    return rhs;
}

// Extends a value-only jet with derivative slots by iterating its own
// evolution equation: slot r+1 is slot r of the right-hand side.
TimeJet grow_jet(const GridField& value, const TimeJet* n1, const TimeJet* forcing,
                 const PhysParams& p, int target_order) {
    TimeJet j(value);
    while (j.order() < target_order) {
        TimeJet rhs = rhs_jet(j, n1, forcing, p);
        if (rhs.order() < j.order()) break; // derivative depth exhausted
        j.push_slot(rhs.slot(j.order()));
    }
    return j;
}

StageFields close_stage(const TimeJet& nk, const TimeJet* pot_offset, const TimeJet* vel_offset,
                        const PhysParams& p) {
    StageFields s;
    s.n = nk;
    s.u = jet_scale(nk, p.wave_speed);
    if (vel_offset) s.u = jet_add(s.u, *vel_offset);
    s.phi = nk;
    if (pot_offset) s.phi = jet_add(s.phi, *pot_offset);
    s.phi = jet_scale(s.phi, p.T_e / p.e_charge);
    return s;
}

} // namespace

ExpansionSeries HierarchyFrame::expansion(int trunc_order) const {
    if (stage.empty()) throw hierarchy_error("HierarchyFrame::expansion: no stages");
    if (trunc_order <= n_stages)
        throw hierarchy_error("HierarchyFrame::expansion: truncation order too small");
    const Grid& g = stage.front().n.grid();
    int min_order = stage.front().n.order();
    for (const auto& s : stage) min_order = std::min({min_order, s.n.order(), s.u.order(), s.phi.order()});
    ExpansionSeries st = empty_expansion(g, trunc_order, min_order);
    for (int k = 1; k <= n_stages; ++k) {
        const StageFields& s = stage[static_cast<size_t>(k - 1)];
        st.density_ratio[k] = s.n;
        st.velocity[k] = s.u;
        st.potential[k] = s.phi;
    }
    return st;
}

std::pair<GridField, GridField> first_profile(const GridField& n1, const PhysParams& p) {
    return {p.wave_speed * n1, (p.T_e / p.e_charge) * n1};
}

HierarchyFrame build_frame(double t, const std::vector<GridField>& n_fields, const PhysParams& p,
                           const HierarchyOptions& opts) {
    const int m = static_cast<int>(n_fields.size());
    if (m < 1 || m > 4) throw hierarchy_error("build_frame: need 1..4 density profiles");
    if (opts.trunc_order < m + 1) throw hierarchy_error("build_frame: trunc_order too small");
    for (const auto& f : n_fields) require_same_grid(f, n_fields.front(), "build_frame");
    // The closure algebra assumes band-limited states (the solvers keep them
    // that way); enforce it for fields arriving from elsewhere.
    std::vector<GridField> fields;
    fields.reserve(n_fields.size());
    for (const auto& f : n_fields) fields.push_back(dealias(f));

    HierarchyFrame fr;
    fr.t = t;
    fr.n_stages = m;

    TimeJet n1 = grow_jet(fields[0], nullptr, nullptr, p, opts.jet_order);
    fr.stage.push_back(close_stage(n1, nullptr, nullptr, p));

    for (int k = 2; k <= m; ++k) {
        // Offsets come from the order-k residual coefficients with the
        // stage-k slot empty; the engine sees only stages < k here.
        fr.n_stages = k - 1;
        ExpansionSeries lo = fr.expansion(opts.trunc_order);
        ResidualSeries r_lo = ep_residual_series(lo, p);
        StageForcings fo;
        fo.pot_offset = jet_lowpass(jet_scale(r_lo.poisson[k], 1.0 / p.poisson_scale()),
                                    opts.forcing_xi_cut);
        TimeJet integrand = jet_scale(r_lo.mass[k], -1.0);
        fo.vel_offset =
            jet_lowpass(jet_antideriv_zero_mean(integrand, opts.mean_tol), opts.forcing_xi_cut);

        // Forcing: order-(k+1) combination with the closure offsets standing
        // in for stage k at zero density. The stage-(k+1) slots cancel in the
        // combination by the determinant condition.
        ExpansionSeries off = lo;
        off.velocity[k] = fo.vel_offset;
        off.potential[k] = jet_scale(fo.pot_offset, p.T_e / p.e_charge);
        ResidualSeries r_off = ep_residual_series(off, p);
        TimeJet comb = jet_scale(r_off.mass[k + 1], p.wave_speed);
        comb = jet_add(comb, r_off.momentum[k + 1]);
        comb = jet_add(comb, jet_scale(jet_dx(r_off.poisson[k + 1], 1), p.poisson_weight()));
        fo.evol_forcing = jet_lowpass(jet_scale(comb, -0.5 / p.wave_speed), opts.forcing_xi_cut);

        TimeJet nk = grow_jet(fields[static_cast<size_t>(k - 1)], &n1, &fo.evol_forcing, p,
                              fo.evol_forcing.order() + 1);
        fr.stage.push_back(close_stage(nk, &fo.pot_offset, &fo.vel_offset, p));
        fr.forcing.push_back(std::move(fo));
        fr.n_stages = k;
    }
    return fr;
}

ExtractedForcings extract_forcings(int k, const std::vector<GridField>& lower_n_fields,
                                   const PhysParams& p, const HierarchyOptions& opts) {
    if (k < 2 || k > 4) throw hierarchy_error("extract_forcings: k must be 2..4");
    if (static_cast<int>(lower_n_fields.size()) != k - 1)
        throw hierarchy_error("extract_forcings: need exactly k-1 lower profiles");
    std::vector<GridField> fields = lower_n_fields;
    fields.push_back(zero_field(lower_n_fields.front().grid));
    HierarchyFrame fr = build_frame(0.0, fields, p, opts);
    const StageForcings& fo = fr.forcing.back();
    return {fo.pot_offset.value(), fo.vel_offset.value(), fo.evol_forcing.value()};
}

int ProfileSet::frame_index(double t) const {
    const double h = dt_out();
    if (h == 0.0) return 0;
    int i = static_cast<int>(std::lround((t - times.front()) / h));
    i = std::max(0, std::min(i, frames() - 1));
    if (std::fabs(times[static_cast<size_t>(i)] - t) > 1e-9 * std::max(1.0, std::fabs(t)))
        throw hierarchy_error("ProfileSet: time not on the stored frame grid");
    return i;
}

HierarchyFrame ProfileSet::frame(int i, int n_stages) const {
    const auto& nf = n_profiles[static_cast<size_t>(i)];
    std::vector<GridField> fields(nf.begin(), nf.begin() + n_stages);
    return build_frame(times[static_cast<size_t>(i)], fields, params, opts);
}

GridField ProfileSet::interp_n(int k, double t) const {
    KdvTrajectory tr;
    tr.grid = grid;
    tr.params = params;
    tr.times = times;
    tr.states.reserve(n_profiles.size());
    for (const auto& arr : n_profiles) tr.states.push_back(arr[static_cast<size_t>(k - 1)]);
    return tr.interp_phase(t);
}

std::array<GridField, 4> ProfileSet::u_from_storage(int i) const {
    const auto& nf = n_profiles[static_cast<size_t>(i)];
    const auto& fo = forcings[static_cast<size_t>(i)];
    std::array<GridField, 4> u{params.wave_speed * nf[0], params.wave_speed * nf[1],
                               params.wave_speed * nf[2], params.wave_speed * nf[3]};
    for (int k = 1; k < 4; ++k) u[static_cast<size_t>(k)] += fo[static_cast<size_t>(k - 1)].vel_offset;
    return u;
}

std::array<GridField, 4> ProfileSet::phi_from_storage(int i) const {
    const auto& nf = n_profiles[static_cast<size_t>(i)];
    const auto& fo = forcings[static_cast<size_t>(i)];
    const double te = params.T_e / params.e_charge;
    std::array<GridField, 4> phi{te * nf[0], te * nf[1], te * nf[2], te * nf[3]};
    for (int k = 1; k < 4; ++k)
        phi[static_cast<size_t>(k)] += te * fo[static_cast<size_t>(k - 1)].pot_offset;
    return phi;
}

std::array<GridField, 4> ProfileSet::u_at(int i) const {
    HierarchyFrame fr = frame(i);
    return {fr.stage[0].u.value(), fr.stage[1].u.value(), fr.stage[2].u.value(), fr.stage[3].u.value()};
}

std::array<GridField, 4> ProfileSet::phi_at(int i) const {
    HierarchyFrame fr = frame(i);
    return {fr.stage[0].phi.value(), fr.stage[1].phi.value(), fr.stage[2].phi.value(),
            fr.stage[3].phi.value()};
}

ProfileSet build_profiles(const std::array<GridField, 4>& n_init, double tau, const PhysParams& p,
                          const BuildOptions& opts) {
    const Grid g = n_init[0].grid;
    for (const auto& f : n_init) require_same_grid(f, n_init[0], "build_profiles");
    if (opts.frames < 2) throw param_error("build_profiles: need at least 2 frames");
    const int n_frames = opts.frames;
    const double frame_dt = tau / (n_frames - 1);
    const int substeps = std::max(1, static_cast<int>(std::ceil(frame_dt / opts.dt - 1e-9)));

    ProfileSet ps;
    ps.grid = g;
    ps.params = p;
    ps.opts = opts.hier;

    KdvTrajectory n1_traj = solve_kdv(n_init[0], tau, p, frame_dt / substeps, substeps);
    ps.times = n1_traj.times;

    std::array<std::vector<GridField>, 4> traj;
    traj[0] = n1_traj.states;

    // Stage k: extract the forcing on the frame grid from the lower stages,
    // then integrate with cubic-in-time sampling of that forcing.
    std::vector<std::array<ExtractedForcings, 3>> forcings(
        static_cast<size_t>(n_frames),
        std::array<ExtractedForcings, 3>{ExtractedForcings{GridField(g), GridField(g), GridField(g)},
                                         ExtractedForcings{GridField(g), GridField(g), GridField(g)},
                                         ExtractedForcings{GridField(g), GridField(g), GridField(g)}});
    for (int k = 2; k <= 4; ++k) {
        KdvTrajectory g_traj;
        g_traj.grid = g;
        g_traj.params = p;
        g_traj.times = ps.times;
        for (int i = 0; i < n_frames; ++i) {
            std::vector<GridField> lower;
            for (int j = 0; j < k - 1; ++j) lower.push_back(traj[static_cast<size_t>(j)][static_cast<size_t>(i)]);
            ExtractedForcings fo = extract_forcings(k, lower, p, opts.hier);
            g_traj.states.push_back(fo.evol_forcing);
            forcings[static_cast<size_t>(i)][static_cast<size_t>(k - 2)] = std::move(fo);
        }
        // the forcing's high modes oscillate at the dispersion rate of the
        // stage it drives; phase-coherent sampling keeps them from turning
        // into secular noise in the next solve
        ForcingSupplier supplier = [&g_traj](double t) { return g_traj.interp_phase(t); };
        KdvTrajectory nk_traj = solve_linearized_kdv(n_init[static_cast<size_t>(k - 1)], supplier,
                                                     n1_traj, tau, p, frame_dt / substeps, substeps);
        traj[static_cast<size_t>(k - 1)] = std::move(nk_traj.states);
    }

    ps.n_profiles.resize(static_cast<size_t>(n_frames),
                         std::array<GridField, 4>{GridField(g), GridField(g), GridField(g), GridField(g)});
    for (int i = 0; i < n_frames; ++i)
        for (int k = 0; k < 4; ++k)
            ps.n_profiles[static_cast<size_t>(i)][static_cast<size_t>(k)] =
                traj[static_cast<size_t>(k)][static_cast<size_t>(i)];
    ps.forcings = std::move(forcings);
    return ps;
}

double CascadeReport::max_relative() const {
    double m = 0.0;
    for (int k = 0; k < 4; ++k) m = std::max({m, mass[static_cast<size_t>(k)], momentum[static_cast<size_t>(k)], poisson[static_cast<size_t>(k)]});
    return m / std::max(1.0, scale);
}

CascadeReport residual_cascade(const HierarchyFrame& fr, const PhysParams& p) {
    if (fr.n_stages != 4) throw hierarchy_error("residual_cascade: needs a fully built frame");
    ExpansionSeries st = fr.expansion(std::max(5, 5));
    ResidualSeries r = ep_residual_series(st, p);
    CascadeReport rep;
    double scale = 0.0;
    for (const auto& s : fr.stage)
        scale = std::max({scale, l2_norm(s.n.value()), l2_norm(s.u.value()), l2_norm(s.phi.value())});
    rep.scale = scale;
    const double pois_unit = std::max(1.0, p.poisson_scale());
    for (int k = 1; k <= 4; ++k) {
        rep.mass[static_cast<size_t>(k - 1)] = l2_norm(r.mass[k].value());
        rep.momentum[static_cast<size_t>(k - 1)] = l2_norm(r.momentum[k].value());
        rep.poisson[static_cast<size_t>(k - 1)] = l2_norm(r.poisson[k].value()) / pois_unit;
    }
    return rep;
}

SignArbitration arbitrate_vel_offset_sign(const GridField& n1_raw, const PhysParams& p,
                                          const HierarchyOptions& opts) {
    const GridField n1 = dealias(n1_raw);
    const Grid g = n1.grid;
    TimeJet n1_jet = grow_jet(n1, nullptr, nullptr, p, opts.jet_order);
    StageFields s1 = close_stage(n1_jet, nullptr, nullptr, p);

    // Candidate integrands for the stage-2 velocity offset.
    TimeJet dt_n1 = jet_dt(n1_jet);
    TimeJet nu_flux = jet_dx(jet_dealias(jet_mul(s1.n, s1.u)), 1);

    SignArbitration arb;
    const double scale = std::max(1.0, l2_norm(n1));
    for (int s = -1; s <= 1; s += 2) {
        TimeJet integrand = jet_add(jet_scale(dt_n1, -1.0), jet_scale(nu_flux, static_cast<double>(s)));
        TimeJet vel_offset = jet_antideriv_zero_mean(integrand, 1.0); // tolerance off: candidates may not integrate
        ExpansionSeries st = empty_expansion(g, opts.trunc_order, std::min(opts.jet_order, vel_offset.order()));
        st.density_ratio[1] = s1.n;
        st.velocity[1] = s1.u;
        st.potential[1] = s1.phi;
        st.velocity[2] = vel_offset;
        // Potential offset does not enter the order-2 mass residual; leave it zero.
        ResidualSeries r = ep_residual_series(st, p);
        const double resid = l2_norm(r.mass[2].value()) / scale;
        if (s < 0)
            arb.resid_minus = resid;
        else
            arb.resid_plus = resid;
    }
    // Exactly one candidate annihilates the residual; demand a clear
    // separation so the verdict is meaningful even on coarse grids.
    const double lo = std::min(arb.resid_minus, arb.resid_plus);
    const double hi = std::max(arb.resid_minus, arb.resid_plus);
    if (!(lo < 1e-3 * hi))
        throw hierarchy_error("arbitrate_vel_offset_sign: arbitration did not select exactly one sign");
    arb.selected = arb.resid_minus < arb.resid_plus ? -1 : +1;
    return arb;
}

} // namespace iaw
