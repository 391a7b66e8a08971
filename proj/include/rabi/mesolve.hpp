#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "rabi/kernel.hpp"
#include "rabi/model.hpp"

namespace rabi {

enum class Frame { full_lab, slow_qubit };

struct EvolutionSpec {
    Frame         mode = Frame::full_lab;
    ModelParams   params;
    FockSpace     space;
    std::vector<double> t_grid;       // strictly increasing, starts at 0
    DensityMatrix initial;
    double        dt = 1e-3;          // fixed RK4 step (1/omega units)

    void validate() const;
    Operator hamiltonian() const;
};

// Right-hand side of the damped evolution:
//   -i[H, rho] + (kappa/2)(2 a rho a^dag - a^dag a rho - rho a^dag a)
// with the jump operator fixed to the mode annihilator of the interleaved
// basis. Reference implementation; evolve() uses an equivalent band kernel.
Operator lindblad_rhs(const DensityMatrix& rho, const Operator& h, double kappa);

struct EvolveStats {
    double max_trace_drift    = 0.0;  // max |Tr rho - 1| over grid times
    double max_top_population = 0.0;  // max mass in the top 4 Fock levels
    bool   truncation_flagged = false;
    double final_time         = 0.0;
};

// Integrates the configured evolution, invoking observer(t, rho) at every
// grid time.
// The observer sees the internal state; it must copy what it keeps.
EvolveStats evolve(const EvolutionSpec& spec,
                   const std::function<void(double, const DensityMatrix&)>& observer);

// Convenience wrapper collecting the state at every grid time.
std::pair<std::vector<DensityMatrix>, EvolveStats> evolve_collect(const EvolutionSpec& spec);

struct SteadyResult {
    DensityMatrix rho;
    double convergence_time = 0.0;
    double residual         = 0.0;  // max |rhs| entry at acceptance
};

// Integrates until max|rhs| < epsilon (checked every ~0.5 time units).
// Throws convergence_error after t_max. Requires kappa > 0.
SteadyResult steady(const EvolutionSpec& spec, double epsilon = 1e-8,
                    double t_max = 500.0);

// Helper fixture states |s, n> used by configs and tests.
DensityMatrix basis_state_density(const FockSpace& space, int s, int n);
PureState     basis_state(const FockSpace& space, int s, int n);

}  // namespace rabi
