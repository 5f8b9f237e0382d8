#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "iaw/hierarchy.hpp"
#include "iaw/spectral.hpp"
#include "test_util.hpp"

using namespace iaw;
using iaw::test::random_band_limited;
using iaw::test::rel_diff;

namespace {
const Grid g = make_grid(256, 80.0);
const PhysParams cold = cold_preset();
const PhysParams warm = warm_preset();

std::array<GridField, 4> soliton_init(const Grid& gr, const PhysParams& p) {
    return {kdv_soliton(gr, p, 1.0, 0.0), zero_field(gr), zero_field(gr), zero_field(gr)};
}
} // namespace

TEST_CASE("first_profile closure") {
    CHECK(max_abs(first_profile(zero_field(g), warm).first) == 0.0);
    GridField n1 = kdv_soliton(g, warm, 1.0, 0.0);
    auto [u1, phi1] = first_profile(n1, warm);
    CHECK(rel_diff(u1, std::sqrt(2.0) * n1) <= 1e-15);
    CHECK(rel_diff(phi1, n1) <= 1e-15);
}

TEST_CASE("extraction with a vanishing leading profile returns zero forcings") {
    std::vector<GridField> lower{zero_field(g)};
    ExtractedForcings fo = extract_forcings(2, lower, cold);
    CHECK(max_abs(fo.pot_offset) == 0.0);
    CHECK(max_abs(fo.vel_offset) == 0.0);
    CHECK(max_abs(fo.evol_forcing) == 0.0);
}

TEST_CASE("stage-2 potential offset matches the closed form") {
    GridField n1 = dealias(kdv_soliton(g, cold, 1.0, 0.0)); // stage fields are band-limited
    std::vector<GridField> lower{n1};
    ExtractedForcings fo = extract_forcings(2, lower, cold);
    // (1/(4 pi e n_bar)) dxx(phi1) - (1/2) (kappa phi1)^2 with phi1 = (T_e/e) n1
    const double kappa = cold.boltzmann_kappa();
    GridField phi1 = (cold.T_e / cold.e_charge) * n1;
    GridField ref = (1.0 / cold.poisson_scale()) * deriv(phi1, 2);
    axpy(ref, -0.5 * kappa * kappa, dealias(phi1 * phi1));
    ref = lowpass(ref, HierarchyOptions{}.forcing_xi_cut); // offsets carry the same cut
    CHECK(l2_norm(fo.pot_offset - ref) <= 1e-10);
}

TEST_CASE("velocity-offset sign arbitration selects the minus sign on both grids") {
    for (int n : {256, 512}) {
        const Grid gr = make_grid(n, 80.0);
        SignArbitration arb = arbitrate_vel_offset_sign(kdv_soliton(gr, cold, 1.0, 0.0), cold);
        CHECK(arb.selected == -1);
        CHECK(arb.resid_minus <= 1e-10);
        CHECK(arb.resid_plus > 1e-3);
    }
}

TEST_CASE("zero initial data builds an identically zero profile set") {
    BuildOptions bo;
    bo.dt = 5e-3;
    bo.frames = 9;
    std::array<GridField, 4> init{zero_field(g), zero_field(g), zero_field(g), zero_field(g)};
    ProfileSet ps = build_profiles(init, 0.2, cold, bo);
    for (int i = 0; i < ps.frames(); ++i)
        for (int k = 0; k < 4; ++k)
            CHECK(max_abs(ps.n_profiles[static_cast<size_t>(i)][static_cast<size_t>(k)]) == 0.0);
}

TEST_CASE("residual cascade vanishes on a soliton-driven hierarchy") {
    BuildOptions bo;
    bo.dt = 2e-3;
    bo.frames = 26;
    const double tau = 0.5;
    ProfileSet ps = build_profiles(soliton_init(g, cold), tau, cold, bo);
    for (int idx : {0, ps.frames() / 2, ps.frames() - 1}) {
        CascadeReport rep = residual_cascade(ps.frame(idx), cold);
        CHECK(rep.max_relative() <= 1e-8);
    }
}

TEST_CASE("residual cascade also vanishes for warm and for non-unit constants") {
    BuildOptions bo;
    bo.dt = 2e-3;
    bo.frames = 11;
    const double tau = 0.2;
    ProfileSet psw = build_profiles(soliton_init(g, warm), tau, warm, bo);
    CHECK(residual_cascade(psw.frame(psw.frames() - 1), warm).max_relative() <= 1e-8);

    // T_e != e_charge exercises the dispersion-coefficient normalization: the
    // order-2 coefficients only cancel with the expansion-consistent value.
    const PhysParams odd = make_params(1.0, 1.2, 0.3, 2.0, 0.05);
    const Grid go = make_grid(256, 120.0);
    std::array<GridField, 4> init{kdv_soliton(go, odd, 1.0, 0.0), zero_field(go), zero_field(go),
                                  zero_field(go)};
    ProfileSet pso = build_profiles(init, tau, odd, bo);
    CHECK(residual_cascade(pso.frame(pso.frames() - 1), odd).max_relative() <= 1e-8);
}

TEST_CASE("profiles are self contained: stage k ignores stages above it") {
    BuildOptions bo;
    bo.dt = 5e-3;
    bo.frames = 6;
    const double tau = 0.1;
    std::array<GridField, 4> a = soliton_init(g, cold);
    std::array<GridField, 4> b = a;
    std::mt19937 rng(23);
    b[3] = random_band_limited(g, rng, 12, 0.3);
    ProfileSet pa = build_profiles(a, tau, cold, bo);
    ProfileSet pb = build_profiles(b, tau, cold, bo);
    for (int i = 0; i < pa.frames(); ++i) {
        for (int k = 0; k < 3; ++k) {
            const GridField& fa = pa.n_profiles[static_cast<size_t>(i)][static_cast<size_t>(k)];
            const GridField& fb = pb.n_profiles[static_cast<size_t>(i)][static_cast<size_t>(k)];
            CHECK(max_abs(fa - fb) == 0.0); // bit-identical
        }
        for (int k = 0; k < 2; ++k) {
            const auto& foa = pa.forcings[static_cast<size_t>(i)][static_cast<size_t>(k)];
            const auto& fob = pb.forcings[static_cast<size_t>(i)][static_cast<size_t>(k)];
            CHECK(max_abs(foa.evol_forcing - fob.evol_forcing) == 0.0);
        }
        // the stage-4 forcing also ignores the stage-4 initial data
        const auto& fa3 = pa.forcings[static_cast<size_t>(i)][2];
        const auto& fb3 = pb.forcings[static_cast<size_t>(i)][2];
        CHECK(max_abs(fa3.evol_forcing - fb3.evol_forcing) == 0.0);
    }
}

TEST_CASE("jet time derivatives match finite differences of the trajectory") {
    // the finite-difference oracle must resolve the fastest dispersive
    // oscillation of the higher profiles; verify its 4th-order convergence
    // toward the jet value under frame refinement
    auto fd_err = [&](int frames, double tau) {
        BuildOptions bo;
        bo.dt = 2.5e-4;
        bo.frames = frames;
        ProfileSet ps = build_profiles(soliton_init(g, cold), tau, cold, bo);
        const double h = ps.dt_out();
        const int i = ps.frames() / 2;
        HierarchyFrame fr = ps.frame(i);
        std::array<double, 4> rel{};
        for (int k = 1; k <= 4; ++k) {
            GridField slot1 = jet_dt(fr.stage[static_cast<size_t>(k - 1)].n).value();
            GridField fd = ps.n_profiles[static_cast<size_t>(i - 2)][static_cast<size_t>(k - 1)] -
                           ps.n_profiles[static_cast<size_t>(i + 2)][static_cast<size_t>(k - 1)];
            axpy(fd, -8.0, ps.n_profiles[static_cast<size_t>(i - 1)][static_cast<size_t>(k - 1)]);
            axpy(fd, 8.0, ps.n_profiles[static_cast<size_t>(i + 1)][static_cast<size_t>(k - 1)]);
            fd *= 1.0 / (12.0 * h);
            rel[static_cast<size_t>(k - 1)] =
                l2_norm(slot1 - fd) / std::max(1.0, l2_norm(slot1));
        }
        return rel;
    };
    const double tau = 0.04;
    auto coarse = fd_err(21, tau); // h = tau/20
    auto fine = fd_err(41, tau);   // h = tau/40
    for (int k = 0; k < 4; ++k) {
        CHECK(fine[static_cast<size_t>(k)] <= 1e-3);
        if (coarse[static_cast<size_t>(k)] > 1e-9) // above roundoff: check the order
            CHECK(coarse[static_cast<size_t>(k)] / fine[static_cast<size_t>(k)] >= 8.0);
    }
}

TEST_CASE("velocity-offset integrands keep a negligible mean") {
    BuildOptions bo;
    bo.dt = 2e-3;
    bo.frames = 11;
    ProfileSet ps = build_profiles(soliton_init(g, cold), 0.2, cold, bo);
    for (int i = 0; i < ps.frames(); ++i)
        for (int k = 0; k < 3; ++k) {
            const auto& fo = ps.forcings[static_cast<size_t>(i)][static_cast<size_t>(k)];
            CHECK(std::fabs(mean(fo.vel_offset)) <= 1e-13);
        }
}

TEST_CASE("extraction argument validation") {
    std::vector<GridField> lower{zero_field(g)};
    CHECK_THROWS_AS(extract_forcings(5, lower, cold), hierarchy_error);
    CHECK_THROWS_AS(extract_forcings(3, lower, cold), hierarchy_error);
    BuildOptions bo;
    bo.frames = 1;
    CHECK_THROWS_AS(build_profiles(soliton_init(g, cold), 0.1, cold, bo), param_error);
}
