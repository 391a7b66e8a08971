#pragma once

#include <Eigen/Dense>

#include "rabi/model.hpp"

namespace rabi {

// Band representation of the system Hamiltonians in the interleaved basis:
// both rabi_hamiltonian and slow_qubit_hamiltonian touch only the main
// diagonal and the raveled off-diagonals +/-1 and +/-3 (qubit flip combined
// with a photon shift). An optional anti-Hermitian decay shift
// -i (kappa/2) a^dag a lives on the diagonal. Applying a band takes
// O(dim^2) instead of a dense O(dim^3) product.
struct BandedOp {
    int dim = 0;
    Eigen::VectorXcd diag;    // main diagonal (complex once shifted)
    Eigen::VectorXd  band1;   // H(i, i+1), real
    Eigen::VectorXd  band3;   // H(i, i+3), real

    // decay_kappa > 0 subtracts i*(kappa/2)*n from the diagonal.
    static BandedOp from_dense(const Operator& h, double decay_kappa = 0.0);

    // out = M * in (matrix or vector right factor)
    void apply(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const;
    void apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const;
};

// One classical RK4 step of dpsi/dt = -i H_eff psi, H_eff in band form.
// Scratch vectors are caller-owned so trajectory loops stay allocation-free.
struct VectorRk4 {
    Eigen::VectorXcd k1, k2, k3, k4, tmp;

    void resize(int dim);
    void step(const BandedOp& heff, Eigen::VectorXcd& psi, double dt);
};

}  // namespace rabi
