#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rabi/model.hpp"

namespace rabi::cli {

// One experiment: engine, physics ratios, grid, output location. Loaded
// from a JSON config file; every key can be overridden by a flag of the
// same name. Exactly one of delta_over_omega / omega0_over_omega must be
// set (they are redundant: delta = 1 - omega0 in omega units).
struct RunConfig {
    std::string engine           = "analytic";    // analytic | mesolve | mcwf
    std::string hamiltonian_mode = "slow_qubit";  // slow_qubit | full_lab
    double g_over_omega      = 2.0;
    double kappa_over_omega  = 0.01;
    double delta_over_omega  = kUnset;
    double omega0_over_omega = kUnset;
    double tau_max  = kUnset;   // required
    double tau_step = 0.05;
    int    n_max    = 64;
    int    n_traj   = 1000;
    std::uint64_t master_seed = 42;
    int    n_report = 20;
    std::string output  = "run.csv";
    std::string initial = "g,0";   // fixture state "<g|e>,<n>"
    double dt = 1e-3;
    // steady mode (mesolve only): integrate to the fixed point instead of a
    // grid; emits a single-row CSV and the convergence time.
    bool   steady      = false;
    double steady_eps  = 1e-8;
    double steady_tmax = 500.0;

    static constexpr double kUnset = -1e300;

    void validate() const;           // throws std::invalid_argument
    ModelParams to_params() const;   // omega = 1
    double resolved_delta() const;
    std::vector<double> grid() const;
};

RunConfig config_from_json_file(const std::string& path);
RunConfig config_from_json_text(const std::string& text);

// Executes one run; writes the CSV to `output` and a metadata sidecar
// alongside it at `output` + ".json" (appended, so a config file with the
// same stem is never overwritten).
// chosen_notes marks preset parameters that are conventions rather than
// externally fixed values. Throws typed errors mapped to exit codes by
// execute().
void run_config(const RunConfig& cfg,
                const std::map<std::string, std::string>& chosen_notes = {});

// All runs behind one preset figure id (1..8), outputs under out_dir.
std::vector<RunConfig> figure_runs(int preset_id, const std::string& out_dir,
                                   std::map<std::string, std::string>& chosen_notes);

enum class CompareMetric { max_abs, rel_at_tau };

// Column-wise comparison of two emitted CSVs. rel_at_tau uses
// |a - b| / |a| at the grid point nearest tau_star (file A is the
// reference); max_abs scans the aligned grids. With interpolate, file B is
// linearly interpolated onto file A's grid.
double compare_csv(const std::string& csv_a, const std::string& csv_b,
                   const std::string& column, CompareMetric metric,
                   double tau_star = 0.0, bool interpolate = false);

// Full command-line entry point; returns the process exit code
// (0 ok, 2 config error, 3 truncation violation, 4 non-convergence).
int execute(const std::vector<std::string>& args);

}  // namespace rabi::cli
