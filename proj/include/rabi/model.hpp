#pragma once

#include <complex>
#include <stdexcept>
#include <Eigen/Dense>

namespace rabi {

// Raised when a run (or a materialized state) puts more weight on the top
// Fock levels than the configured tolerance allows: n_max is too small.
struct truncation_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when a fixed-point search exhausts its time budget.
struct convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using cplx          = std::complex<double>;
using Operator      = Eigen::MatrixXcd;
using DensityMatrix = Eigen::MatrixXcd;
using PureState     = Eigen::VectorXcd;

// Physical parameters of the dissipative qubit-mode system. The mode
// frequency omega is the unit of every rate; run inputs are dimensionless
// ratios and times are tau = omega * t.
struct ModelParams {
    double omega  = 1.0;  // mode frequency
    double omega0 = 0.0;  // qubit splitting
    double g      = 0.0;  // coupling strength
    double kappa  = 0.0;  // mode decay rate

    double delta() const { return omega - omega0; }
    void validate() const;
};

// Truncated qubit (x) Fock space with the fixed interleaved basis
// index = 2n + s, s = 0 for |g>, s = 1 for |e>.
struct FockSpace {
    int n_max = 64;  // highest retained Fock level (inclusive)

    int dim() const { return 2 * (n_max + 1); }
    int index_of(int n, int s) const { return 2 * n + s; }
    static int n_of(int index) { return index / 2; }
    static int s_of(int index) { return index % 2; }
    void validate() const;
};

// Mode annihilation operator, identity on the qubit factor.
Operator annihilation(const FockSpace& space);

// sigma_z (|e><e| - |g><g|), identity on the mode factor.
Operator pauli_z(const FockSpace& space);

// Qubit lowering operator |g><e|, identity on the mode factor.
Operator lowering(const FockSpace& space);

// H = omega a^dag a + (omega0/2) sigma_z + g (sigma + sigma^dag)(a + a^dag)
Operator rabi_hamiltonian(const ModelParams& params, const FockSpace& space);

// H = delta a^dag a + g sigma_x (a + a^dag); commutes with sigma_x.
Operator slow_qubit_hamiltonian(const ModelParams& params, const FockSpace& space);

// Parity  Pi = -sigma_z (-1)^(a^dag a); +1 on {|g,2N>, |e,2N+1>}.
Operator parity_operator(const FockSpace& space);

}  // namespace rabi
