#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "rabi/analytic.hpp"
#include "rabi/cli.hpp"

using namespace rabi;
using rabi::cli::RunConfig;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

fs::path scratch() {
    const fs::path dir = fs::temp_directory_path() / "rabi_cli_suite";
    fs::create_directories(dir);
    return dir;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    int col(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return int(i);
        REQUIRE(false);
        return -1;
    }
};

Csv load_csv(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    Csv out;
    std::string line, cell;
    std::getline(in, line);
    std::stringstream hs(line);
    while (std::getline(hs, cell, ',')) out.header.push_back(cell);
    while (std::getline(in, line)) {
        std::stringstream rs(line);
        std::vector<double> row;
        while (std::getline(rs, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        out.rows.push_back(std::move(row));
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args) { return rabi::cli::execute(args); }

}  // namespace

TEST_SUITE("cli_suite") {

TEST_CASE("config parsing and validation") {
    SUBCASE("unknown keys are rejected") {
        CHECK_THROWS_AS(cli::config_from_json_text(R"({"gamma": 1.0})"),
                        std::invalid_argument);
    }
    SUBCASE("malformed json is rejected") {
        CHECK_THROWS_AS(cli::config_from_json_text("{oops"), std::invalid_argument);
    }
    SUBCASE("wrong value type is rejected") {
        CHECK_THROWS_AS(cli::config_from_json_text(R"({"n_max": "big"})"),
                        std::invalid_argument);
    }
    SUBCASE("detuning must be specified exactly once") {
        RunConfig cfg = cli::config_from_json_text(
            R"({"engine":"analytic","g_over_omega":2.0,"tau_max":1.0})");
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg.delta_over_omega = 0.5;
        cfg.omega0_over_omega = 0.5;
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg.omega0_over_omega = RunConfig::kUnset;
        CHECK_NOTHROW(cfg.validate());
        CHECK(cfg.to_params().omega0 == doctest::Approx(0.5));
    }
    SUBCASE("splitting form converts to detuning") {
        RunConfig cfg;
        cfg.omega0_over_omega = 0.2;
        cfg.tau_max = 1.0;
        CHECK(cfg.resolved_delta() == doctest::Approx(0.8));
    }
    SUBCASE("initial state grammar") {
        RunConfig cfg;
        cfg.delta_over_omega = 1.0;
        cfg.tau_max = 1.0;
        cfg.initial = "x,0";
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg.initial = "g,banana";
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg.initial = "g,999";
        CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
        cfg.initial = "e,3";
        CHECK_NOTHROW(cfg.validate());
    }
    SUBCASE("grid covers [0, tau_max]") {
        RunConfig cfg;
        cfg.delta_over_omega = 1.0;
        cfg.tau_max = 1.0;
        cfg.tau_step = 0.25;
        const std::vector<double> g = cfg.grid();
        REQUIRE(g.size() == 5);
        CHECK(g.front() == 0.0);
        CHECK(g.back() == doctest::Approx(1.0));
    }
}

TEST_CASE("bad invocations exit with the config code") {
    const fs::path dir = scratch();
    CHECK(run_cli({"run", "--engine", "bogus", "--tau_max", "1",
                   "--delta_over_omega", "1", "--output",
                   (dir / "x.csv").string()}) == 2);
    CHECK(run_cli({"run", "--engine", "analytic", "--delta_over_omega", "1",
                   "--output", (dir / "x.csv").string()}) == 2);  // no tau_max
    CHECK(run_cli({"run", "--engine", "analytic", "--tau_max", "1",
                   "--delta_over_omega", "1", "--initial", "e,1", "--output",
                   (dir / "x.csv").string()}) == 2);  // analytic needs the vacuum
    CHECK(run_cli({"nonsense"}) == 2);
}

TEST_CASE("revival structure in an undamped run") {
    const fs::path dir = scratch();
    const fs::path out = dir / "revival.csv";
    REQUIRE(run_cli({"run", "--engine", "analytic", "--g_over_omega", "2",
                     "--kappa_over_omega", "0", "--delta_over_omega", "1",
                     "--tau_max", "12.6", "--tau_step", "0.05", "--output",
                     out.string()}) == 0);
    Csv csv = load_csv(out);
    const int ct = csv.col("tau"), cn = csv.col("mean_photon");

    auto argmin_in = [&](double lo, double hi) {
        double best_t = 0.0, best_v = 1e300;
        for (const auto& r : csv.rows)
            if (r[ct] >= lo && r[ct] <= hi && r[cn] < best_v) {
                best_v = r[cn];
                best_t = r[ct];
            }
        return std::pair<double, double>{best_t, best_v};
    };
    const auto [t_min, v_min] = argmin_in(5.8, 6.8);
    CHECK(std::abs(t_min - 2.0 * kPi) <= 0.05 + 1e-12);
    CHECK(v_min < 0.01);

    double peak = 0.0;
    for (const auto& r : csv.rows)
        if (r[ct] >= 2.9 && r[ct] <= 3.4) peak = std::max(peak, r[cn]);
    CHECK(peak > 15.99);  // 4 g^2 / delta^2 = 16 at the half period
    CHECK(peak <= 16.0 + 1e-9);
}

TEST_CASE("uncoupled decay through the full pipeline") {
    const fs::path dir = scratch();
    const fs::path out = dir / "decay.csv";
    REQUIRE(run_cli({"run", "--engine", "mesolve", "--hamiltonian_mode",
                     "slow_qubit", "--g_over_omega", "0", "--kappa_over_omega",
                     "0.5", "--delta_over_omega", "1", "--initial", "g,2",
                     "--n_max", "8", "--n_report", "8", "--tau_max", "2",
                     "--tau_step", "0.25", "--output", out.string()}) == 0);
    Csv csv = load_csv(out);
    const int ct = csv.col("tau"), cn = csv.col("mean_photon");
    for (const auto& r : csv.rows)
        CHECK(r[cn] == doctest::Approx(2.0 * std::exp(-0.5 * r[ct])).epsilon(1e-6));
}

TEST_CASE("trajectory runs are reproducible byte for byte") {
    const fs::path dir = scratch();
    const fs::path o1 = dir / "traj1.csv", o2 = dir / "traj2.csv";
    const std::vector<std::string> common = {
        "run", "--engine", "mcwf", "--hamiltonian_mode", "full_lab",
        "--g_over_omega", "2", "--kappa_over_omega", "0.05",
        "--omega0_over_omega", "0.2", "--tau_max", "1", "--tau_step", "0.5",
        "--n_traj", "20", "--master_seed", "7", "--n_max", "32",
        "--n_report", "6"};
    auto with_out = [&](const fs::path& p) {
        std::vector<std::string> v = common;
        v.push_back("--output");
        v.push_back(p.string());
        return v;
    };
    REQUIRE(run_cli(with_out(o1)) == 0);
    REQUIRE(run_cli(with_out(o2)) == 0);
    CHECK(slurp(o1) == slurp(o2));
    CHECK(slurp(o1).find("nan") != std::string::npos);  // purity column
    Csv csv = load_csv(o1);
    CHECK(csv.col("se_mean_photon") >= 0);
    CHECK(csv.col("se_chain_minus_6") >= 0);
}

TEST_CASE("comparison metrics") {
    const fs::path dir = scratch();
    const fs::path a = dir / "cmp_a.csv", b = dir / "cmp_b.csv", c = dir / "cmp_c.csv";
    REQUIRE(run_cli({"run", "--engine", "analytic", "--g_over_omega", "1",
                     "--kappa_over_omega", "0.1", "--delta_over_omega", "1",
                     "--tau_max", "2", "--tau_step", "0.5", "--output",
                     a.string()}) == 0);
    REQUIRE(run_cli({"run", "--engine", "analytic", "--g_over_omega", "1",
                     "--kappa_over_omega", "0.2", "--delta_over_omega", "1",
                     "--tau_max", "2", "--tau_step", "0.5", "--output",
                     b.string()}) == 0);
    REQUIRE(run_cli({"run", "--engine", "analytic", "--g_over_omega", "1",
                     "--kappa_over_omega", "0.1", "--delta_over_omega", "1",
                     "--tau_max", "2", "--tau_step", "0.4", "--output",
                     c.string()}) == 0);

    CHECK(cli::compare_csv(a.string(), a.string(), "mean_photon",
                           cli::CompareMetric::max_abs) == 0.0);
    CHECK(cli::compare_csv(a.string(), b.string(), "mean_photon",
                           cli::CompareMetric::max_abs) > 0.0);

    AnalyticModel m1{1.0, 1.0, 0.1, QubitInit::ground};
    AnalyticModel m2{1.0, 1.0, 0.2, QubitInit::ground};
    const double expected =
        std::abs(mean_photon(m1, 1.0) - mean_photon(m2, 1.0)) / mean_photon(m1, 1.0);
    // 1.1 snaps to the nearest grid point 1.0
    CHECK(cli::compare_csv(a.string(), b.string(), "mean_photon",
                           cli::CompareMetric::rel_at_tau, 1.1) ==
          doctest::Approx(expected).epsilon(1e-12));

    CHECK_THROWS_AS(cli::compare_csv(a.string(), c.string(), "mean_photon",
                                     cli::CompareMetric::max_abs),
                    std::invalid_argument);
    CHECK_NOTHROW(cli::compare_csv(a.string(), c.string(), "mean_photon",
                                   cli::CompareMetric::max_abs, 0.0, true));
}

TEST_CASE("csv values round-trip at full precision") {
    const fs::path dir = scratch();
    const fs::path out = dir / "roundtrip.csv";
    REQUIRE(run_cli({"run", "--engine", "analytic", "--g_over_omega", "2",
                     "--kappa_over_omega", "0.01", "--delta_over_omega", "1",
                     "--tau_max", "3", "--tau_step", "0.75", "--output",
                     out.string()}) == 0);
    Csv csv = load_csv(out);
    const int ct = csv.col("tau"), cn = csv.col("mean_photon"), cg = csv.col("p_g");
    AnalyticModel m{2.0, 1.0, 0.01, QubitInit::ground};
    for (const auto& r : csv.rows) {
        CHECK(r[cn] == mean_photon(m, r[ct]));  // bitwise
        CHECK(r[cg] == qubit_populations(m, r[ct]).first);
    }
}

TEST_CASE("figure presets") {
    const fs::path dir = scratch() / "figs";
    SUBCASE("snapshot grid has thirteen rows") {
        REQUIRE(run_cli({"figure", "3", "--out", dir.string()}) == 0);
        Csv csv = load_csv(dir / "fig3_snapshots.csv");
        CHECK(csv.rows.size() == 13);
        CHECK(csv.rows[1][0] == doctest::Approx(kPi));
    }
    SUBCASE("dry run emits configs only, with the choices recorded") {
        const fs::path ddir = scratch() / "figs_dry";
        REQUIRE(run_cli({"figure", "1", "--out", ddir.string(), "--dry-run"}) == 0);
        CHECK_FALSE(fs::exists(ddir / "fig1_g0.5.csv"));
        REQUIRE(fs::exists(ddir / "fig1_g0.5.csv.json"));
        nlohmann::json j = nlohmann::json::parse(slurp(ddir / "fig1_g0.5.csv.json"));
        CHECK(j["dry_run"] == true);
        CHECK(j["chosen"].contains("g_over_omega"));
        CHECK(j["config"]["engine"] == "analytic");
    }
    SUBCASE("five-panel preset pairs the closed form with trajectories") {
        std::map<std::string, std::string> notes;
        const auto runs = cli::figure_runs(5, "unused", notes);
        REQUIRE(runs.size() == 2);
        CHECK(runs[0].engine == "analytic");
        CHECK(runs[1].engine == "mcwf");
        CHECK(runs[1].hamiltonian_mode == "full_lab");
        CHECK(runs[1].resolved_delta() == doctest::Approx(0.8));
        CHECK(runs[1].n_traj == 1000);
    }
    SUBCASE("invalid id is a config error") {
        CHECK(run_cli({"figure", "9", "--out", dir.string()}) == 2);
    }
}

TEST_CASE("failure exit codes") {
    const fs::path dir = scratch();
    SUBCASE("truncation violation exits 3 and still writes the sidecar") {
        const fs::path out = dir / "trunc.csv";
        CHECK(run_cli({"run", "--engine", "mesolve", "--hamiltonian_mode",
                       "slow_qubit", "--g_over_omega", "2", "--kappa_over_omega",
                       "0.01", "--delta_over_omega", "1", "--n_max", "8",
                       "--n_report", "8", "--tau_max", "3", "--tau_step", "1",
                       "--output", out.string()}) == 3);
        nlohmann::json j = nlohmann::json::parse(slurp(dir / "trunc.csv.json"));
        CHECK(j["diagnostics"]["truncation_flagged"] == true);
    }
    SUBCASE("non-convergence exits 4") {
        CHECK(run_cli({"run", "--engine", "mesolve", "--hamiltonian_mode",
                       "slow_qubit", "--g_over_omega", "2", "--kappa_over_omega",
                       "0.2", "--delta_over_omega", "1", "--steady",
                       "--steady_tmax", "1", "--output",
                       (dir / "nc.csv").string()}) == 4);
    }
}

TEST_CASE("sweep emits one run per value plus a manifest") {
    const fs::path dir = scratch();
    const fs::path cfg = dir / "sweep_base.json";
    {
        std::ofstream out(cfg);
        out << R"({"engine":"analytic","g_over_omega":1.0,"kappa_over_omega":0.1,)"
            << R"("delta_over_omega":1.0,"tau_max":1.0,"tau_step":0.5,)"
            << R"("output":"ignored.csv"})";
    }
    const fs::path sdir = dir / "sweep_out";
    REQUIRE(run_cli({"sweep", "--config", cfg.string(), "--param",
                     "kappa_over_omega", "--values", "0.1,0.3", "--out",
                     sdir.string()}) == 0);
    CHECK(fs::exists(sdir / "kappa_over_omega_0.1.csv"));
    CHECK(fs::exists(sdir / "kappa_over_omega_0.3.csv"));
    nlohmann::json manifest = nlohmann::json::parse(slurp(sdir / "manifest.json"));
    CHECK(manifest.size() == 2);
    CHECK(manifest[1]["kappa_over_omega"] == 0.3);
}

}  // TEST_SUITE
