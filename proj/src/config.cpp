#include "iaw/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace iaw {

PhysParams ExperimentConfig::params() const {
    if (preset == "warm") return warm_preset();
    if (preset == "cold") return cold_preset();
    if (preset == "custom") return make_params(e_charge, mass_M, T_i, T_e, n_bar);
    throw config_error("unknown preset: " + preset);
}

std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        size_t pos = 0;
        double v = std::stod(tok, &pos);
        out.push_back(v);
    }
    return out;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error("config key " + key + ": not a number: " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw config_error("config key " + key + ": not an integer: " + v);
    }
}

} // namespace

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "preset")
        cfg.preset = value;
    else if (key == "e_charge")
        cfg.e_charge = to_double(key, value);
    else if (key == "mass_M")
        cfg.mass_M = to_double(key, value);
    else if (key == "T_i")
        cfg.T_i = to_double(key, value);
    else if (key == "T_e")
        cfg.T_e = to_double(key, value);
    else if (key == "n_bar")
        cfg.n_bar = to_double(key, value);
    else if (key == "n_points")
        cfg.n_points = to_int(key, value);
    else if (key == "length")
        cfg.length = to_double(key, value);
    else if (key == "tau")
        cfg.tau = to_double(key, value);
    else if (key == "eps_list")
        cfg.eps_list = parse_eps_list(value);
    else if (key == "soliton_speed")
        cfg.soliton_speed = to_double(key, value);
    else if (key == "soliton_center")
        cfg.soliton_center = to_double(key, value);
    else if (key == "init_file")
        cfg.init_file = value;
    else if (key == "cfl_safety")
        cfg.cfl_safety = to_double(key, value);
    else if (key == "kdv_dt")
        cfg.kdv_dt = to_double(key, value);
    else if (key == "profile_frames")
        cfg.profile_frames = to_int(key, value);
    else if (key == "forcing_xi_cut")
        cfg.forcing_xi_cut = to_double(key, value);
    else if (key == "resid_tol")
        cfg.resid_tol = to_double(key, value);
    else if (key == "poisson_tol")
        cfg.poisson_tol = to_double(key, value);
    else if (key == "mean_tol")
        cfg.mean_tol = to_double(key, value);
    else if (key == "max_newton")
        cfg.max_newton = to_int(key, value);
    else if (key == "workers")
        cfg.workers = to_int(key, value);
    else if (key == "out_dir")
        cfg.out_dir = value;
    else
        throw config_error("unknown config key: " + key);
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file: " + path);
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    (void)cfg.params(); // validates preset / custom constants
    if (cfg.n_points < 8) throw config_error("n_points must be >= 8");
    if (!(cfg.length > 0.0)) throw config_error("length must be > 0");
    if (!(cfg.tau > 0.0)) throw config_error("tau must be > 0");
    if (cfg.eps_list.empty()) throw config_error("eps_list must not be empty");
    for (double e : cfg.eps_list)
        if (!(e > 0.0)) throw config_error("eps_list entries must be > 0");
    for (size_t i = 1; i < cfg.eps_list.size(); ++i)
        if (!(cfg.eps_list[i] < cfg.eps_list[i - 1]))
            throw config_error("eps_list must be strictly decreasing");
    if (!(cfg.soliton_speed > 0.0)) throw config_error("soliton_speed must be > 0");
    if (!(cfg.kdv_dt > 0.0)) throw config_error("kdv_dt must be > 0");
    if (cfg.profile_frames < 5) throw config_error("profile_frames must be >= 5");
    if (!(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0))
        throw config_error("cfl_safety must be in (0, 1]");
    if (!(cfg.resid_tol > 0.0) || !(cfg.poisson_tol > 0.0) || !(cfg.mean_tol > 0.0))
        throw config_error("tolerances must be > 0");
    if (cfg.max_newton < 1) throw config_error("max_newton must be >= 1");
    if (cfg.workers < 0) throw config_error("workers must be >= 0");
}

} // namespace iaw
