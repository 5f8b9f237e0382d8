#pragma once

#include <array>
#include <utility>
#include <vector>

#include "iaw/kdv.hpp"
#include "iaw/residual.hpp"

namespace iaw {

struct HierarchyOptions {
    int trunc_order = 5;   // series truncation; one past the highest used coefficient
    int jet_order = 4;     // time-derivative depth carried for the leading profile
    double mean_tol = kDefaultMeanTol;
    double resid_tol = 1e-8;
    // Optional low-pass on extracted forcings (0 = off). The extraction
    // chain applies up to twelve spatial derivatives, amplifying the
    // double-precision spectral floor by xi^12, so on grids whose dealias
    // cutoff exceeds xi ~ 5 the high modes of the stage-3/4 forcings are
    // floor noise. Cutting them keeps trajectories clean but leaves the
    // cut-away part visible in the residual cascade; production runs instead
    // choose grids with the cutoff at the precision depth limit and keep the
    // algebra exact.
    double forcing_xi_cut = 0.0;
};

// One expansion profile (n, u, phi) as time jets at a single instant.
struct StageFields {
    TimeJet n, u, phi;
};

// Closure data extracted for one stage k >= 2:
//   phi^k = (T_e/e) (n^k + pot_offset)
//   u^k   = V n^k + vel_offset
// and the inhomogeneity evol_forcing in the stage-k evolution equation.
struct StageForcings {
    TimeJet pot_offset;   // h
    TimeJet vel_offset;   // g, zero-mean antiderivative of the extracted integrand
    TimeJet evol_forcing; // G
};

// All profiles and forcings at one instant, with their time jets.
struct HierarchyFrame {
    double t = 0.0;
    int n_stages = 0;
    std::vector<StageFields> stage;     // [k-1] for k = 1..n_stages
    std::vector<StageForcings> forcing; // [k-2] for k = 2..n_stages

    // Expansion series with slots 1..n_stages populated (others zero).
    ExpansionSeries expansion(int trunc_order) const;
};

// u^1 = V n^1, phi^1 = (T_e/e) n^1.
std::pair<GridField, GridField> first_profile(const GridField& n1, const PhysParams& p);

// Builds jets and extracts all closure offsets and forcings for stages
// 1..n_stages from the given profile density fields at one instant.
HierarchyFrame build_frame(double t, const std::vector<GridField>& n_fields, const PhysParams& p,
                           const HierarchyOptions& opts = {});

// Extraction for a single stage k >= 2 given the lower-stage densities
// (n^1 .. n^{k-1}) at one instant. Returns slot-0 fields of (h, g, G).
struct ExtractedForcings {
    GridField pot_offset, vel_offset, evol_forcing;
};
ExtractedForcings extract_forcings(int k, const std::vector<GridField>& lower_n_fields,
                                   const PhysParams& p, const HierarchyOptions& opts = {});

// The four-profile hierarchy sampled on a uniform time grid. Only the density
// profiles are primary storage; closures, jets and forcings are rebuilt on
// demand from them (they are spatial functionals of the densities).
struct ProfileSet {
    Grid grid;
    PhysParams params;
    HierarchyOptions opts;
    std::vector<double> times;
    std::vector<std::array<GridField, 4>> n_profiles;       // [frame][k-1]
    std::vector<std::array<ExtractedForcings, 3>> forcings; // [frame][k-2]

    int frames() const { return static_cast<int>(times.size()); }
    double dt_out() const { return frames() > 1 ? times[1] - times[0] : 0.0; }
    int frame_index(double t) const;

    HierarchyFrame frame(int i, int n_stages = 4) const;
    // Slot-0 closure fields at a stored frame straight from the stored
    // forcings (no jet rebuild); the cheap path for remainder extraction.
    std::array<GridField, 4> u_from_storage(int i) const;
    std::array<GridField, 4> phi_from_storage(int i) const;
    // Stage-k density at arbitrary time (cubic interpolation), k in 1..4.
    GridField interp_n(int k, double t) const;
    // Slot-0 closure fields at a stored frame.
    std::array<GridField, 4> n_at(int i) const { return n_profiles[static_cast<size_t>(i)]; }
    std::array<GridField, 4> u_at(int i) const;
    std::array<GridField, 4> phi_at(int i) const;
};

struct BuildOptions {
    double dt = 1e-3;    // integrator step for every stage solve
    int frames = 201;    // stored frames including t = 0
    HierarchyOptions hier;
};

// Solves stage 1 with the leading-profile equation, then stages 2..4 with
// extracted forcings and the linearized equation, storing all profiles and
// forcings on the shared frame grid.
ProfileSet build_profiles(const std::array<GridField, 4>& n_init, double tau, const PhysParams& p,
                          const BuildOptions& opts);

// L2 norms of the order-1..4 residual coefficients of the scaled system on a
// fully built frame, plus the profile scale used for relative comparisons.
struct CascadeReport {
    std::array<double, 4> mass{}, momentum{}, poisson{};
    double scale = 1.0;
    double max_relative() const;
};
CascadeReport residual_cascade(const HierarchyFrame& fr, const PhysParams& p);

// Decides the sign s in the candidate integrand -dt(n^1) + s*dx(n^1 u^1) for
// the stage-2 velocity offset by testing which choice annihilates the
// order-2 mass residual. Exactly one must.
struct SignArbitration {
    double resid_minus = 0.0; // engine residual with s = -1
    double resid_plus = 0.0;  // engine residual with s = +1
    int selected = 0;         // -1 or +1
};
SignArbitration arbitrate_vel_offset_sign(const GridField& n1, const PhysParams& p,
                                          const HierarchyOptions& opts = {});

} // namespace iaw
