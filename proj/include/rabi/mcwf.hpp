#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rabi/mesolve.hpp"
#include "rabi/model.hpp"
#include "rabi/observables.hpp"

namespace rabi {

// H_eff = H - i (kappa/2) a^dag a; drift generator between quantum jumps.
Operator effective_hamiltonian(const Operator& h, double kappa,
                               const FockSpace& space);

struct TrajectoryResult {
    std::vector<double> t_grid;
    std::vector<ObservableSet> rows;   // one per grid time, normalized state
    int jump_count = 0;
    std::vector<double> jump_times;
};

struct TrajectoryHooks {
    // Called at each jump with (time, normalized pre-jump state,
    // normalized post-jump state). Used by instrumented tests.
    std::function<void(double, const PureState&, const PureState&)> on_jump;
};

// Single quantum-jump trajectory: deterministic drift under H_eff, jump when
// the squared norm crosses a pre-drawn uniform threshold, jump time refined
// by bisection, then apply the annihilator, renormalize, redraw.
TrajectoryResult run_trajectory(const PureState& psi0, const EvolutionSpec& spec,
                                std::uint64_t seed,
                                const TrajectoryHooks& hooks = {});

struct EnsembleResult {
    std::vector<double> t_grid;
    int n_traj = 0;
    std::uint64_t master_seed = 0;
    int n_report = 20;

    // Per grid time: trajectory means and standard errors. stderr entries
    // are NaN when n_traj < 2.
    std::vector<double> mean_photon, se_photon;
    std::vector<double> p_g, se_p_g;
    std::vector<double> p_e, se_p_e;
    // chain_plus[n][k]: chain occupation n at grid time k, n <= n_report.
    std::vector<std::vector<double>> chain_plus, se_chain_plus;
    std::vector<std::vector<double>> chain_minus, se_chain_minus;

    double mean_jumps = 0.0;
    int min_jumps = 0, max_jumps = 0;
    long total_jumps = 0;
};

// Ensemble of independent trajectories with per-trajectory seeds derived
// from (master_seed, index). Accumulation uses fixed 16-trajectory blocks
// merged pairwise in index order, so results are bit-identical however the
// trajectory work is scheduled.
EnsembleResult run_ensemble(const PureState& psi0, const EvolutionSpec& spec,
                            int n_traj, std::uint64_t master_seed,
                            int n_report = 20);

}  // namespace rabi
