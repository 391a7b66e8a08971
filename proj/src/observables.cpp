#include "rabi/observables.hpp"

#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace rabi {

namespace {

ObservableSet from_diagonal(const Eigen::VectorXd& pop, double purity_value,
                            const FockSpace& space) {
    ObservableSet obs;
    obs.purity = purity_value;
    obs.photon_dist.assign(space.n_max + 1, 0.0);
    obs.chain_plus.assign(space.n_max + 1, 0.0);
    obs.chain_minus.assign(space.n_max + 1, 0.0);
    for (int n = 0; n <= space.n_max; ++n) {
        const double pg = pop(space.index_of(n, 0));
        const double pe = pop(space.index_of(n, 1));
        obs.photon_dist[n] = pg + pe;
        obs.mean_photon += n * (pg + pe);
        obs.p_g += pg;
        obs.p_e += pe;
        // plus chain: |g,even> and |e,odd>
        if (n % 2 == 0) {
            obs.chain_plus[n] = pg;
            obs.chain_minus[n] = pe;
        } else {
            obs.chain_plus[n] = pe;
            obs.chain_minus[n] = pg;
        }
        obs.parity_expectation += obs.chain_plus[n] - obs.chain_minus[n];
    }
    return obs;
}

}  // namespace

ObservableSet measure(const DensityMatrix& rho, const FockSpace& space) {
    if (rho.rows() != space.dim() || rho.cols() != space.dim())
        throw std::invalid_argument("measure: dimension mismatch");
    const Eigen::VectorXd pop = rho.diagonal().real();
    return from_diagonal(pop, rho.squaredNorm(), space);
}

ObservableSet measure(const PureState& psi, const FockSpace& space) {
    if (psi.size() != space.dim())
        throw std::invalid_argument("measure: dimension mismatch");
    const Eigen::VectorXd pop = psi.cwiseAbs2();
    const double n2 = pop.sum();
    return from_diagonal(pop, n2 * n2, space);
}

Eigen::MatrixXcd displacement(const FockSpace& space, cplx alpha) {
    space.validate();
    const int m = space.n_max + 1;
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(m, m);
    for (int n = 1; n < m; ++n) {
        gen(n, n - 1) = alpha * std::sqrt(double(n));           // alpha a^dag
        gen(n - 1, n) = -std::conj(alpha) * std::sqrt(double(n));  // -conj(alpha) a
    }
    return gen.exp();
}

namespace {

bool displacement_warn(const FockSpace& space, cplx alpha) {
    return std::norm(alpha) > space.n_max / 4.0;
}

}  // namespace

cplx char_function(const DensityMatrix& rho, const FockSpace& space, cplx alpha,
                   bool* truncation_warning) {
    if (rho.rows() != space.dim() || rho.cols() != space.dim())
        throw std::invalid_argument("char_function: dimension mismatch");
    if (truncation_warning) *truncation_warning = displacement_warn(space, alpha);
    const Eigen::MatrixXcd d = displacement(space, alpha);
    // Tr[rho (1 (x) D)] over the interleaved basis.
    cplx chi = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n <= space.n_max; ++n)
            for (int q = 0; q <= space.n_max; ++q)
                chi += rho(space.index_of(n, s), space.index_of(q, s)) * d(q, n);
    return chi;
}

cplx char_function(const PureState& psi, const FockSpace& space, cplx alpha,
                   bool* truncation_warning) {
    if (psi.size() != space.dim())
        throw std::invalid_argument("char_function: dimension mismatch");
    if (truncation_warning) *truncation_warning = displacement_warn(space, alpha);
    const Eigen::MatrixXcd d = displacement(space, alpha);
    cplx chi = 0.0;
    for (int s = 0; s < 2; ++s)
        for (int n = 0; n <= space.n_max; ++n)
            for (int q = 0; q <= space.n_max; ++q)
                chi += std::conj(psi(space.index_of(n, s))) * d(n, q) *
                       psi(space.index_of(q, s));
    return chi;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("trace_distance: dimension mismatch");
    const Eigen::MatrixXcd diff = a - b;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        0.5 * (diff + diff.adjoint().eval()));
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace rabi
