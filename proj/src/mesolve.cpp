#include "rabi/mesolve.hpp"

#include <cmath>

namespace rabi {

namespace {

constexpr cplx kMinusI{0.0, -1.0};
constexpr double kTopLevelTol = 1e-8;
constexpr int kTopLevels = 4;

// Workspace for the density-matrix stepper: one band application gives
// B = (H - i(kappa/2) a^dag a) rho; the full generator follows as
// -i(B - B^dag) + kappa a rho a^dag, with the sandwich term a pair of
// index-shifted diagonal scalings.
struct RhoKernel {
    BandedOp a_eff;
    double kappa;
    int dim;
    Eigen::VectorXd sq;  // sqrt(n) aligned with the shifted block
    Eigen::MatrixXcd b, k1, k2, k3, k4, tmp;

    RhoKernel(const Operator& h, double kappa_, int dim_)
        : a_eff(BandedOp::from_dense(h, kappa_)), kappa(kappa_), dim(dim_) {
        sq.resize(std::max(0, dim - 2));
        for (int i = 0; i + 2 < dim; ++i) sq(i) = std::sqrt(double(FockSpace::n_of(i + 2)));
        b.resize(dim, dim);
        k1.resize(dim, dim);
        k2.resize(dim, dim);
        k3.resize(dim, dim);
        k4.resize(dim, dim);
        tmp.resize(dim, dim);
    }

    void rhs(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
        a_eff.apply(rho, b);
        out = kMinusI * (b - b.adjoint().eval());
        if (kappa > 0.0 && dim > 2)
            out.topLeftCorner(dim - 2, dim - 2).noalias() +=
                kappa * (sq.asDiagonal() * rho.bottomRightCorner(dim - 2, dim - 2) *
                         sq.asDiagonal());
    }

    void step(Eigen::MatrixXcd& rho, double dt) {
        rhs(rho, k1);
        tmp = rho + (0.5 * dt) * k1;
        rhs(tmp, k2);
        tmp = rho + (0.5 * dt) * k2;
        rhs(tmp, k3);
        tmp = rho + dt * k3;
        rhs(tmp, k4);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        // The generator above equals the physical one only on Hermitian
        // matrices; rounding noise in the anti-Hermitian sector grows at rates
        // up to kappa*n_max/2, so project it out after every step.
        b = rho.adjoint();
        rho = 0.5 * (rho + b);
    }
};

double top_level_population(const DensityMatrix& rho, const FockSpace& space) {
    double mass = 0.0;
    const int lo = std::max(0, space.n_max - (kTopLevels - 1));
    for (int n = lo; n <= space.n_max; ++n)
        for (int s = 0; s < 2; ++s)
            mass += rho(space.index_of(n, s), space.index_of(n, s)).real();
    return mass;
}

int substep_count(double interval, double dt) {
    return std::max(1, static_cast<int>(std::ceil(interval / dt - 1e-9)));
}

}  // namespace

void EvolutionSpec::validate() const {
    params.validate();
    space.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw std::invalid_argument("t_grid must start at 0");
    for (size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("t_grid must be strictly increasing");
    if (initial.rows() != space.dim() || initial.cols() != space.dim())
        throw std::invalid_argument("initial state dimension mismatch");
}

Operator EvolutionSpec::hamiltonian() const {
    return mode == Frame::full_lab ? rabi_hamiltonian(params, space)
                                   : slow_qubit_hamiltonian(params, space);
}

Operator lindblad_rhs(const DensityMatrix& rho, const Operator& h, double kappa) {
    const int dim = static_cast<int>(rho.rows());
    if (rho.cols() != dim || h.rows() != dim || h.cols() != dim)
        throw std::invalid_argument("lindblad_rhs: dimension mismatch");
    Operator out = kMinusI * (h * rho - rho * h);
    if (kappa > 0.0) {
        Eigen::VectorXd num(dim);
        for (int i = 0; i < dim; ++i) num(i) = FockSpace::n_of(i);
        // 2 a rho a^dag: index-shifted block scaled by sqrt(n_i n_j)
        if (dim > 2) {
            Eigen::VectorXd sq(dim - 2);
            for (int i = 0; i + 2 < dim; ++i) sq(i) = std::sqrt(double(FockSpace::n_of(i + 2)));
            out.topLeftCorner(dim - 2, dim - 2).noalias() +=
                kappa * (sq.asDiagonal() * rho.bottomRightCorner(dim - 2, dim - 2) *
                         sq.asDiagonal());
        }
        out -= (0.5 * kappa) * (num.asDiagonal() * rho + rho * num.asDiagonal());
    }
    return out;
}

EvolveStats evolve(const EvolutionSpec& spec,
                   const std::function<void(double, const DensityMatrix&)>& observer) {
    spec.validate();
    const int dim = spec.space.dim();
    RhoKernel kernel(spec.hamiltonian(), spec.params.kappa, dim);
    DensityMatrix rho = spec.initial;

    EvolveStats stats;
    auto record = [&](double t) {
        stats.max_trace_drift =
            std::max(stats.max_trace_drift, std::abs(rho.trace().real() - 1.0));
        stats.max_top_population =
            std::max(stats.max_top_population, top_level_population(rho, spec.space));
        if (observer) observer(t, rho);
    };

    record(spec.t_grid.front());
    for (size_t i = 1; i < spec.t_grid.size(); ++i) {
        const double interval = spec.t_grid[i] - spec.t_grid[i - 1];
        const int n_sub = substep_count(interval, spec.dt);
        const double h = interval / n_sub;
        for (int k = 0; k < n_sub; ++k) kernel.step(rho, h);
        record(spec.t_grid[i]);
    }
    stats.final_time = spec.t_grid.back();
    stats.truncation_flagged = stats.max_top_population > kTopLevelTol;
    return stats;
}

std::pair<std::vector<DensityMatrix>, EvolveStats> evolve_collect(const EvolutionSpec& spec) {
    std::vector<DensityMatrix> states;
    states.reserve(spec.t_grid.size());
    EvolveStats stats = evolve(
        spec, [&](double, const DensityMatrix& rho) { states.push_back(rho); });
    return {std::move(states), stats};
}

SteadyResult steady(const EvolutionSpec& spec, double epsilon, double t_max) {
    spec.validate();
    if (!(spec.params.kappa > 0.0))
        throw std::invalid_argument("steady: kappa must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("steady: epsilon must be positive");

    const int dim = spec.space.dim();
    RhoKernel kernel(spec.hamiltonian(), spec.params.kappa, dim);
    DensityMatrix rho = spec.initial;

    const int check_every = std::max(1, static_cast<int>(std::llround(0.5 / spec.dt)));
    double t = 0.0;
    while (t < t_max) {
        for (int k = 0; k < check_every && t < t_max; ++k) {
            kernel.step(rho, spec.dt);
            t += spec.dt;
        }
        kernel.rhs(rho, kernel.tmp);
        const double residual = kernel.tmp.cwiseAbs().maxCoeff();
        if (residual < epsilon) return {std::move(rho), t, residual};
    }
    throw convergence_error("steady: residual did not reach epsilon within t_max");
}

PureState basis_state(const FockSpace& space, int s, int n) {
    space.validate();
    if (s != 0 && s != 1) throw std::invalid_argument("qubit label must be 0 (g) or 1 (e)");
    if (n < 0 || n > space.n_max) throw std::invalid_argument("fock level out of range");
    PureState psi = PureState::Zero(space.dim());
    psi(space.index_of(n, s)) = 1.0;
    return psi;
}

DensityMatrix basis_state_density(const FockSpace& space, int s, int n) {
    const PureState psi = basis_state(space, s, n);
    return psi * psi.adjoint();
}

}  // namespace rabi
