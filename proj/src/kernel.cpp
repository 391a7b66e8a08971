#include "rabi/kernel.hpp"

#include <stdexcept>

namespace rabi {

namespace {
constexpr cplx kMinusI{0.0, -1.0};
}

BandedOp BandedOp::from_dense(const Operator& h, double decay_kappa) {
    const int dim = static_cast<int>(h.rows());
    if (h.cols() != dim) throw std::invalid_argument("hamiltonian must be square");
    BandedOp op;
    op.dim = dim;
    op.diag = h.diagonal();
    if (decay_kappa != 0.0)
        for (int i = 0; i < dim; ++i)
            op.diag(i) -= cplx(0.0, 0.5 * decay_kappa * FockSpace::n_of(i));
    op.band1 = Eigen::VectorXd::Zero(std::max(0, dim - 1));
    op.band3 = Eigen::VectorXd::Zero(std::max(0, dim - 3));
    for (int i = 0; i + 1 < dim; ++i) op.band1(i) = h(i, i + 1).real();
    for (int i = 0; i + 3 < dim; ++i) op.band3(i) = h(i, i + 3).real();
    return op;
}

void BandedOp::apply(const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) const {
    out.noalias() = diag.asDiagonal() * in;
    if (dim > 1) {
        out.topRows(dim - 1).noalias() += band1.asDiagonal() * in.bottomRows(dim - 1);
        out.bottomRows(dim - 1).noalias() += band1.asDiagonal() * in.topRows(dim - 1);
    }
    if (dim > 3) {
        out.topRows(dim - 3).noalias() += band3.asDiagonal() * in.bottomRows(dim - 3);
        out.bottomRows(dim - 3).noalias() += band3.asDiagonal() * in.topRows(dim - 3);
    }
}

void BandedOp::apply(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) const {
    out.array() = diag.array() * in.array();
    if (dim > 1) {
        out.head(dim - 1).array() += band1.array() * in.tail(dim - 1).array();
        out.tail(dim - 1).array() += band1.array() * in.head(dim - 1).array();
    }
    if (dim > 3) {
        out.head(dim - 3).array() += band3.array() * in.tail(dim - 3).array();
        out.tail(dim - 3).array() += band3.array() * in.head(dim - 3).array();
    }
}

void VectorRk4::resize(int dim) {
    k1.resize(dim);
    k2.resize(dim);
    k3.resize(dim);
    k4.resize(dim);
    tmp.resize(dim);
}

void VectorRk4::step(const BandedOp& heff, Eigen::VectorXcd& psi, double dt) {
    heff.apply(psi, k1);
    k1 *= kMinusI;
    tmp = psi + (0.5 * dt) * k1;
    heff.apply(tmp, k2);
    k2 *= kMinusI;
    tmp = psi + (0.5 * dt) * k2;
    heff.apply(tmp, k3);
    k3 *= kMinusI;
    tmp = psi + dt * k3;
    heff.apply(tmp, k4);
    k4 *= kMinusI;
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace rabi
