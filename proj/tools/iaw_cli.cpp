// Command-line front end: kdv | profiles | ep | sweep | report.
// Exit codes: 0 success, 2 configuration error, 3 numeric failure,
// 4 acceptance-threshold failure in --check mode.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "iaw/sweep.hpp"

namespace {

iaw::ExperimentConfig load_config(const std::string& config_path,
                                  const std::vector<std::string>& sets, const std::string& out_dir,
                                  const std::string& eps_override, bool eps_given) {
    iaw::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = iaw::parse_config_file(config_path);
    for (const std::string& s : sets) {
        const size_t eq = s.find('=');
        if (eq == std::string::npos) throw iaw::config_error("--set expects key=value, got: " + s);
        iaw::apply_override(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    if (eps_given) cfg.eps_list = iaw::parse_eps_list(eps_override);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (const char* env = std::getenv("IAW_OUT_DIR"); env && *env) cfg.out_dir = env;
    iaw::validate_config(cfg);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ion-acoustic expansion laboratory"};
    app.require_subcommand(1);
    app.fallthrough(); // global options may follow the subcommand

    std::string config_path, out_dir, eps_override, report_path;
    std::vector<std::string> sets;
    bool check = false;
    double ep_eps = 0.1;

    app.add_option("--config", config_path, "configuration file (key = value lines)");
    app.add_option("--out", out_dir, "output directory (overrides config and IAW_OUT_DIR)");
    auto* eps_opt = app.add_option("--eps", eps_override, "comma-separated eps list override");
    app.add_option("--set", sets, "extra key=value overrides")->take_all();
    app.add_flag("--check", check, "evaluate acceptance-style gates; exit 4 on failure");

    auto* cmd_kdv = app.add_subcommand("kdv", "solve the leading-profile equation");
    auto* cmd_profiles = app.add_subcommand("profiles", "build the four-profile hierarchy");
    auto* cmd_ep = app.add_subcommand("ep", "direct solve of the scaled system at one eps");
    cmd_ep->add_option("--at", ep_eps, "eps value for the direct solve");
    auto* cmd_sweep = app.add_subcommand("sweep", "direct solves over the eps list + diagnostics");
    auto* cmd_report = app.add_subcommand("report", "summarize a sweep_rows.csv");
    cmd_report->add_option("--rows", report_path, "path to sweep_rows.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2; // malformed command line is a configuration error
    }

    try {
        if (cmd_report->parsed()) {
            const std::string path = report_path.empty()
                                         ? (out_dir.empty() ? "out" : out_dir) + "/sweep_rows.csv"
                                         : report_path;
            auto rows = iaw::read_sweep_rows(path);
            std::cout << "rows: " << rows.size() << "\n";
            for (const auto& r : rows) {
                std::cout << "eps=" << r.eps << (r.ok ? "" : " FAILED " + r.message)
                          << " sup_H2=" << r.sup_h2 << " fp_undiv=" << r.fp_undiv
                          << " max_resid=(" << r.max_mass_resid << ", " << r.max_mom_resid << ", "
                          << r.max_pois_resid << ")\n";
            }
            for (size_t i = 0; i + 1 < rows.size(); ++i)
                if (rows[i].ok && rows[i + 1].ok && rows[i + 1].fp_undiv > 0.0)
                    std::cout << "order(" << rows[i].eps << "->" << rows[i + 1].eps << ") = "
                              << std::log(rows[i].fp_undiv / rows[i + 1].fp_undiv) /
                                     std::log(rows[i].eps / rows[i + 1].eps)
                              << "\n";
            return 0;
        }

        iaw::ExperimentConfig cfg =
            load_config(config_path, sets, out_dir, eps_override, eps_opt->count() > 0);

        if (cmd_kdv->parsed()) {
            iaw::KdvRunResult r = iaw::run_kdv(cfg, true);
            std::cout << "kdv: frames=" << r.traj.frames()
                      << " final_shape_error=" << r.final_shape_error
                      << " drifts(mass,momentum,energy)=(" << r.max_mass_drift << ", "
                      << r.max_momentum_drift << ", " << r.max_energy_drift << ")\n";
            if (check && (r.final_shape_error > 1e-6 || r.max_mass_drift > 1e-8 ||
                          r.max_momentum_drift > 1e-8 || r.max_energy_drift > 1e-8))
                return 4;
            return 0;
        }
        if (cmd_profiles->parsed()) {
            iaw::ProfilesRunResult r = iaw::run_profiles(cfg, true);
            std::cout << r.sign_log_line << "\n";
            for (int j = 0; j < 3; ++j)
                std::cout << "cascade[" << j << "] max relative residual = "
                          << r.cascade[static_cast<size_t>(j)].max_relative() << "\n";
            std::cout << "stage-2 potential-offset reference diff = " << r.pot_offset_ref_diff
                      << "\n";
            bool ok = r.pot_offset_ref_diff <= 1e-10;
            for (const auto& c : r.cascade) ok = ok && c.max_relative() <= cfg.resid_tol;
            if (check && !ok) return 4;
            return 0;
        }
        if (cmd_ep->parsed()) {
            iaw::ExperimentConfig pcfg = cfg;
            iaw::ProfilesRunResult prof = iaw::run_profiles(pcfg, false);
            iaw::EpTrajectory traj = iaw::run_ep_single(cfg, ep_eps, prof.ps);
            iaw::ensure_directory(cfg.out_dir);
            iaw::TrajectoryFile tf;
            tf.grid = traj.states.front().n.grid;
            tf.field_names = {"n", "u", "phi"};
            tf.times = traj.times;
            for (const auto& s : traj.states) tf.data.push_back({s.n, s.u, s.phi});
            iaw::write_trajectory(cfg.out_dir + "/ep_trajectory.bin", tf);
            std::cout << "ep: eps=" << ep_eps << " frames=" << traj.frames() << "\n";
            return 0;
        }
        if (cmd_sweep->parsed()) {
            iaw::SweepReport rep = iaw::run_sweep(cfg, true);
            std::cout << iaw::sweep_summary(rep);
            iaw::SweepCheck chk = iaw::check_sweep(rep);
            if (!chk.detail.empty()) std::cout << chk.detail;
            if (check && !chk.ok) return 4;
            return 0;
        }
    } catch (const iaw::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const iaw::error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
