#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "iaw/config.hpp"
#include "iaw/io.hpp"
#include "iaw/sweep.hpp"
#include "test_util.hpp"

using namespace iaw;
// run_kdv / kdv_soliton come via sweep.hpp

namespace {
std::string temp_dir() {
    auto d = std::filesystem::temp_directory_path() / "iaw_test_io";
    std::filesystem::create_directories(d);
    return d.string();
}

std::string write_temp(const std::string& name, const std::string& text) {
    const std::string path = temp_dir() + "/" + name;
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}
} // namespace

TEST_CASE("config parsing, defaults and overrides") {
    const std::string path = write_temp("ok.cfg",
                                        "# experiment\n"
                                        "preset = warm\n"
                                        "n_points = 128\n"
                                        "tau = 1.5   # inline comment\n"
                                        "eps_list = 0.2, 0.1\n");
    ExperimentConfig cfg = parse_config_file(path);
    CHECK(cfg.preset == "warm");
    CHECK(cfg.n_points == 128);
    CHECK(cfg.tau == doctest::Approx(1.5));
    REQUIRE(cfg.eps_list.size() == 2);
    CHECK(cfg.eps_list[1] == doctest::Approx(0.1));
    CHECK(cfg.length == doctest::Approx(60.0)); // untouched default

    apply_override(cfg, "soliton_center", "-4");
    CHECK(cfg.soliton_center == doctest::Approx(-4.0));
    CHECK_THROWS_AS(apply_override(cfg, "not_a_key", "1"), config_error);
    CHECK_THROWS_AS(apply_override(cfg, "tau", "abc"), config_error);
}

TEST_CASE("config validation failures") {
    ExperimentConfig cfg;
    cfg.tau = -1.0;
    CHECK_THROWS_AS(validate_config(cfg), config_error);
    cfg = ExperimentConfig{};
    cfg.eps_list = {};
    CHECK_THROWS_AS(validate_config(cfg), config_error);
    cfg = ExperimentConfig{};
    cfg.eps_list = {0.1, 0.2};
    CHECK_THROWS_AS(validate_config(cfg), config_error);
    cfg = ExperimentConfig{};
    cfg.preset = "plasma";
    CHECK_THROWS_AS(validate_config(cfg), config_error);
    const std::string bad = write_temp("bad.cfg", "tau\n");
    CHECK_THROWS_AS(parse_config_file(bad), config_error);
}

TEST_CASE("trajectory files round trip bit-exactly") {
    std::mt19937 rng(3);
    const Grid g = make_grid(64, 12.5);
    TrajectoryFile t;
    t.grid = g;
    t.field_names = {"n", "u"};
    for (int i = 0; i < 5; ++i) {
        t.times.push_back(0.25 * i);
        t.data.push_back({iaw::test::random_band_limited(g, rng), iaw::test::random_band_limited(g, rng)});
    }
    const std::string path = temp_dir() + "/traj.bin";
    write_trajectory(path, t);
    TrajectoryFile back = read_trajectory(path);
    CHECK(back.grid == g);
    REQUIRE(back.field_names == t.field_names);
    REQUIRE(back.times.size() == t.times.size());
    for (size_t i = 0; i < t.times.size(); ++i) {
        CHECK(back.times[i] == t.times[i]);
        for (size_t f = 0; f < t.field_names.size(); ++f)
            CHECK(back.data[i][f].v == t.data[i][f].v);
    }
}

TEST_CASE("csv escaping follows the quoted-field convention") {
    const std::string path = temp_dir() + "/cells.csv";
    {
        CsvWriter csv(path);
        csv.row({"plain", "with,comma", "with\"quote"});
    }
    CHECK(slurp(path) == "plain,\"with,comma\",\"with\"\"quote\"\r\n");
}

TEST_CASE("identical configurations produce identical sweep outputs") {
    ExperimentConfig cfg;
    cfg.preset = "cold";
    cfg.n_points = 64;
    cfg.length = 60.0;
    cfg.tau = 0.05;
    cfg.profile_frames = 6;
    cfg.kdv_dt = 2e-3;
    cfg.eps_list = {0.2, 0.1};
    cfg.workers = 2;
    cfg.out_dir = temp_dir() + "/sweep_a";
    SweepReport a = run_sweep(cfg, true);
    cfg.out_dir = temp_dir() + "/sweep_b";
    SweepReport b = run_sweep(cfg, true);
    CHECK(slurp(temp_dir() + "/sweep_a/sweep_rows.csv") ==
          slurp(temp_dir() + "/sweep_b/sweep_rows.csv"));
    REQUIRE(a.rows.size() == b.rows.size());
    for (size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].sup_h2 == b.rows[i].sup_h2);
        CHECK(a.rows[i].fp_undiv == b.rows[i].fp_undiv);
    }
    // rows can be read back
    auto rows = read_sweep_rows(temp_dir() + "/sweep_a/sweep_rows.csv");
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].eps == doctest::Approx(0.2));
    CHECK(rows[0].ok);
}

TEST_CASE("initial data can come from a trajectory file") {
    const Grid g = make_grid(64, 60.0);
    const PhysParams p = cold_preset();
    GridField n0 = kdv_soliton(g, p, 0.2, 0.0);
    TrajectoryFile t;
    t.grid = g;
    t.field_names = {"n1"};
    t.times = {0.0};
    t.data.push_back({n0});
    const std::string path = temp_dir() + "/init.bin";
    write_trajectory(path, t);
    ExperimentConfig cfg;
    cfg.preset = "cold";
    cfg.n_points = 64;
    cfg.length = 60.0;
    cfg.tau = 0.02;
    cfg.profile_frames = 5;
    cfg.kdv_dt = 2e-3;
    cfg.init_file = path;
    KdvRunResult r = run_kdv(cfg, false);
    CHECK(max_abs(r.traj.states.front() - dealias(n0)) <= 1e-12);
    // mismatched grid is rejected
    cfg.n_points = 128;
    CHECK_THROWS_AS(run_kdv(cfg, false), config_error);
}

TEST_CASE("sweep rows isolate failures") {
    // an absurd CFL factor makes every direct solve fail; rows must report
    // the failure rather than aborting the sweep
    ExperimentConfig cfg;
    cfg.preset = "cold";
    cfg.n_points = 64;
    cfg.length = 60.0;
    cfg.tau = 0.02;
    cfg.profile_frames = 5;
    cfg.kdv_dt = 2e-3;
    cfg.eps_list = {0.2, 0.1};
    cfg.workers = 1;
    cfg.poisson_tol = 1e-30; // unreachable tolerance: elliptic failure
    cfg.max_newton = 1;
    SweepReport rep = run_sweep(cfg, false);
    REQUIRE(rep.rows.size() == 2);
    CHECK(!rep.rows[0].ok);
    CHECK(!rep.rows[1].ok);
    CHECK(!rep.rows[0].message.empty());
}
