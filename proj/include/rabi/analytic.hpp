#pragma once

#include <complex>
#include <tuple>

#include "rabi/model.hpp"

namespace rabi {

enum class QubitInit { ground, excited };

// Closed-form solution of the damped slow-qubit model. Valid whenever the
// qubit splitting is negligible against the mode frequency and coupling;
// exact for the slow-qubit Hamiltonian at any detuning.
struct AnalyticModel {
    double g      = 0.0;
    double delta  = 0.0;
    double kappa  = 0.0;
    QubitInit initial = QubitInit::ground;

    cplx z() const { return {kappa / 2.0, delta}; }
    void validate() const;  // rejects kappa = delta = 0 and negative rates

    static AnalyticModel from_params(const ModelParams& p,
                                     QubitInit init = QubitInit::ground);
};

// (beta(t), F(t)) plus the derived scalars at one time.
struct AnalyticSnapshot {
    double t = 0.0;
    cplx   beta;
    double f = 1.0;
};

enum class ChainParity { plus, minus };
enum class CharSector { pp, mm, pm, mp };

// Coherent amplitude beta(t) = (i g / z)(e^{-z t} - 1).
cplx beta(const AnalyticModel& m, double t);

// Decoherence envelope F(t) in (0, 1]; multiplies every qubit coherence.
double decoherence(const AnalyticModel& m, double t);

AnalyticSnapshot snapshot(const AnalyticModel& m, double t);

// P(|g,n>) or P(|e,n>) at time t; level 0 = g, 1 = e.
double joint_prob(const AnalyticModel& m, double t, int level, int n);

// Tr rho^2 in [1/2, 1].
double purity(const AnalyticModel& m, double t);

// (P_g, P_e) = ((1 +/- F)/2), swapped for an initially excited qubit.
std::pair<double, double> qubit_populations(const AnalyticModel& m, double t);

// Poisson photon statistics with parameter |beta|^2.
double photon_dist(const AnalyticModel& m, double t, int n);
double mean_photon(const AnalyticModel& m, double t);

// Parity-chain occupation: P+_n = (|beta|^{2n}/n!) P_{g,0} and the
// complementary assignment for the minus chain.
double chain_prob(const AnalyticModel& m, double t, ChainParity parity, int n);

struct SteadyInfo {
    cplx   beta_s;
    double mean_photon_s;
    double energy_s;
};

// Fixed point of the damped amplitude: beta_S = -i g / z. Requires kappa > 0.
SteadyInfo steady_state(const AnalyticModel& m);

// Materialized density matrix on the truncated space. Throws when the
// coherent-state tail beyond n_max carries more than tail_tol weight.
DensityMatrix density_matrix(const AnalyticModel& m, double t,
                             const FockSpace& space, double tail_tol = 1e-10);

// Gaussian characteristic functions of the four sigma_x-basis sectors.
cplx char_function(const AnalyticModel& m, double t, cplx alpha, CharSector sector);

}  // namespace rabi
