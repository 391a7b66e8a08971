#include "rabi/model.hpp"

#include <cmath>
#include <stdexcept>

namespace rabi {

void ModelParams::validate() const {
    if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
    if (!(omega0 >= 0.0) || omega0 > omega)
        throw std::invalid_argument("omega0 must satisfy 0 <= omega0 <= omega");
    if (!(g >= 0.0)) throw std::invalid_argument("g must be non-negative");
    if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be non-negative");
}

void FockSpace::validate() const {
    if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
}

Operator annihilation(const FockSpace& space) {
    space.validate();
    Operator a = Operator::Zero(space.dim(), space.dim());
    for (int n = 1; n <= space.n_max; ++n)
        for (int s = 0; s < 2; ++s)
            a(space.index_of(n - 1, s), space.index_of(n, s)) = std::sqrt(double(n));
    return a;
}

Operator pauli_z(const FockSpace& space) {
    space.validate();
    Operator sz = Operator::Zero(space.dim(), space.dim());
    for (int n = 0; n <= space.n_max; ++n) {
        sz(space.index_of(n, 0), space.index_of(n, 0)) = -1.0;
        sz(space.index_of(n, 1), space.index_of(n, 1)) = +1.0;
    }
    return sz;
}

Operator lowering(const FockSpace& space) {
    space.validate();
    Operator sm = Operator::Zero(space.dim(), space.dim());
    for (int n = 0; n <= space.n_max; ++n)
        sm(space.index_of(n, 0), space.index_of(n, 1)) = 1.0;
    return sm;
}

Operator rabi_hamiltonian(const ModelParams& params, const FockSpace& space) {
    params.validate();
    space.validate();
    const Operator a  = annihilation(space);
    const Operator sm = lowering(space);
    const Operator sx = sm + sm.adjoint().eval();
    Operator h = params.omega * (a.adjoint() * a);
    h += 0.5 * params.omega0 * pauli_z(space);
    h += params.g * (sx * (a + a.adjoint().eval()));
    return h;
}

Operator slow_qubit_hamiltonian(const ModelParams& params, const FockSpace& space) {
    params.validate();
    space.validate();
    const Operator a  = annihilation(space);
    const Operator sm = lowering(space);
    const Operator sx = sm + sm.adjoint().eval();
    Operator h = params.delta() * (a.adjoint() * a);
    h += params.g * (sx * (a + a.adjoint().eval()));
    return h;
}

Operator parity_operator(const FockSpace& space) {
    space.validate();
    Operator pi = Operator::Zero(space.dim(), space.dim());
    for (int n = 0; n <= space.n_max; ++n) {
        const double mode_sign = (n % 2 == 0) ? 1.0 : -1.0;
        pi(space.index_of(n, 0), space.index_of(n, 0)) = +mode_sign;  // -sigma_z = +1 on |g>
        pi(space.index_of(n, 1), space.index_of(n, 1)) = -mode_sign;
    }
    return pi;
}

}  // namespace rabi
