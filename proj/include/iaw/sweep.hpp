#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "iaw/config.hpp"
#include "iaw/io.hpp"
#include "iaw/remainder.hpp"

namespace iaw {

// ---- single KdV run (cmd: kdv) ----------------------------------------

struct KdvRunResult {
    KdvTrajectory traj;
    std::vector<KdvInvariants> invariants; // per output time
    std::vector<double> shape_error;       // L2 error vs translated exact profile
    double final_shape_error = 0.0;
    double max_mass_drift = 0.0, max_momentum_drift = 0.0, max_energy_drift = 0.0;
};
KdvRunResult run_kdv(const ExperimentConfig& cfg, bool write_files);

// ---- hierarchy build (cmd: profiles) -----------------------------------

struct ProfilesRunResult {
    ProfileSet ps;
    SignArbitration sign;
    std::array<CascadeReport, 3> cascade{}; // t = 0, tau/2, tau
    double pot_offset_ref_diff = 0.0;       // engine vs closed-form stage-2 offset
    std::string sign_log_line;
};
ProfilesRunResult run_profiles(const ExperimentConfig& cfg, bool write_files);

// ---- direct solve (cmd: ep) ---------------------------------------------

EpTrajectory run_ep_single(const ExperimentConfig& cfg, double eps, const ProfileSet& ps);

// ---- eps sweep (cmd: sweep) ----------------------------------------------

struct SweepRow {
    double eps = 0.0;
    bool ok = false;
    std::string message;
    double sup_h2 = 0.0;          // sup_t ||(n_R, u_R, phi_R)||_H2
    double sup_eps_norm = 0.0;    // sup_t weighted (u, phi) norm
    double sup_uniform = 0.0;     // sup_t sqrt(H2 triple^2 + weighted extras)
    double fp_div = 0.0;          // ||(n/n_bar-1)/eps - n^1||_H2 at t = tau
    double fp_undiv = 0.0;        // eps * fp_div
    std::array<double, 3> equiv_low{}, equiv_high{}; // at t = tau, alpha = 0..2
    double max_mass_resid = 0.0, max_mom_resid = 0.0, max_pois_resid = 0.0;
    double mass_route_diff = 0.0, mom_route_diff = 0.0, pois_route_diff = 0.0;
    double wall_seconds = 0.0;
    std::vector<NormReport> norms;            // per output time
    RemainderResidualReport residuals;        // per interior time
};

struct SweepReport {
    ExperimentConfig cfg;
    std::vector<SweepRow> rows;
    // observed convergence orders between consecutive eps pairs
    std::vector<double> order_undiv, order_div;
};

SweepReport run_sweep(const ExperimentConfig& cfg, bool write_files);
std::string sweep_summary(const SweepReport& rep);

// Bounded-family / convergence-order / ratio-stability gates used by the
// --check flag; detail explains any failure.
struct SweepCheck {
    bool ok = true;
    std::string detail;
};
SweepCheck check_sweep(const SweepReport& rep);

// Re-read a sweep row table written by run_sweep (cmd: report).
std::vector<SweepRow> read_sweep_rows(const std::string& csv_path);

} // namespace iaw
