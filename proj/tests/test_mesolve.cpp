#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "rabi/analytic.hpp"
#include "rabi/mesolve.hpp"
#include "rabi/observables.hpp"

using namespace rabi;

namespace {
constexpr double kPi = 3.14159265358979323846;

EvolutionSpec make_spec(Frame mode, ModelParams p, int n_max,
                        std::vector<double> grid, int s0 = 0, int n0 = 0) {
    EvolutionSpec spec;
    spec.mode = mode;
    spec.params = p;
    spec.space.n_max = n_max;
    spec.t_grid = std::move(grid);
    spec.initial = basis_state_density(spec.space, s0, n0);
    return spec;
}

std::vector<double> uniform_grid(double t_max, double step) {
    std::vector<double> g;
    for (double t = 0.0; t <= t_max + 1e-12; t += step) g.push_back(t);
    return g;
}
}  // namespace

TEST_SUITE("mesolve") {

TEST_CASE("generator on simple states") {
    FockSpace space{4};
    ModelParams p{1.0, 1.0, 0.0, 0.4};  // zero detuning, zero coupling
    Operator h = slow_qubit_hamiltonian(p, space);
    REQUIRE(h.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    SUBCASE("one-photon state relaxes into the vacuum") {
        DensityMatrix rho = basis_state_density(space, 0, 1);
        DensityMatrix r = lindblad_rhs(rho, h, p.kappa);
        CHECK(r(space.index_of(0, 0), space.index_of(0, 0)).real() ==
              doctest::Approx(p.kappa));
        CHECK(r(space.index_of(1, 0), space.index_of(1, 0)).real() ==
              doctest::Approx(-p.kappa));
        CHECK(std::abs(r.trace()) < 1e-15);
    }
    SUBCASE("vacuum is stationary") {
        DensityMatrix rho = basis_state_density(space, 1, 0);
        CHECK(lindblad_rhs(rho, h, p.kappa).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("coherence between 0 and 1 decays at kappa/2") {
        DensityMatrix rho = DensityMatrix::Zero(space.dim(), space.dim());
        rho(space.index_of(0, 0), space.index_of(1, 0)) = 1.0;
        DensityMatrix r = lindblad_rhs(rho, h, p.kappa);
        CHECK(std::abs(r(space.index_of(0, 0), space.index_of(1, 0)) -
                       cplx(-0.5 * p.kappa, 0.0)) < 1e-15);
    }
}

TEST_CASE("closed-system generator annihilates hamiltonian eigenstates") {
    FockSpace space{10};
    ModelParams p{1.0, 0.4, 1.3, 0.0};
    Operator h = rabi_hamiltonian(p, space);
    Eigen::SelfAdjointEigenSolver<Operator> es(h);
    for (int k : {0, 3, 9}) {
        PureState v = es.eigenvectors().col(k);
        DensityMatrix rho = v * v.adjoint();
        CHECK(lindblad_rhs(rho, h, 0.0).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("grid validation") {
    EvolutionSpec spec = make_spec(Frame::slow_qubit, {1.0, 0.0, 1.0, 0.1}, 8, {0.0, 1.0});
    CHECK_NOTHROW(spec.validate());
    spec.t_grid = {0.5, 1.0};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.t_grid = {0.0, 1.0, 1.0};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec.t_grid = {0.0, 1.0};
    spec.dt = 0.0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("uncoupled decay follows the exponential law") {
    ModelParams p{1.0, 0.0, 0.0, 0.5};
    EvolutionSpec spec =
        make_spec(Frame::slow_qubit, p, 8, uniform_grid(2.0, 0.5), 0, 3);
    std::vector<double> ns;
    evolve(spec, [&](double, const DensityMatrix& rho) {
        ns.push_back(measure(rho, spec.space).mean_photon);
    });
    for (size_t k = 0; k < spec.t_grid.size(); ++k)
        CHECK(ns[k] == doctest::Approx(3.0 * std::exp(-p.kappa * spec.t_grid[k]))
                           .epsilon(1e-10));
}

TEST_CASE("integrated state matches the closed form") {
    ModelParams p{1.0, 0.0, 2.0, 0.05};
    EvolutionSpec spec =
        make_spec(Frame::slow_qubit, p, 56, uniform_grid(2.0 * kPi, kPi / 6.0));
    AnalyticModel m = AnalyticModel::from_params(p);

    double worst_n = 0.0, worst_pg = 0.0, worst_td = 0.0, worst_joint = 0.0;
    EvolveStats stats = evolve(spec, [&](double t, const DensityMatrix& rho) {
        ObservableSet o = measure(rho, spec.space);
        worst_n = std::max(worst_n, std::abs(o.mean_photon - mean_photon(m, t)) /
                                        (1.0 + mean_photon(m, t)));
        worst_pg =
            std::max(worst_pg, std::abs(o.p_g - qubit_populations(m, t).first));
        for (int n = 0; n <= 10; ++n)
            worst_joint = std::max(
                worst_joint, std::abs(o.chain_plus[n] -
                                      chain_prob(m, t, ChainParity::plus, n)));
        worst_td = std::max(worst_td,
                            trace_distance(rho, density_matrix(m, t, spec.space)));
    });
    CHECK(worst_n < 1e-8);
    CHECK(worst_pg < 1e-8);
    CHECK(worst_joint < 1e-8);
    CHECK(worst_td < 1e-7);
    CHECK(stats.max_trace_drift < 1e-10);
    CHECK_FALSE(stats.truncation_flagged);
}

TEST_CASE("lab frame at zero splitting reduces to the detuned oscillator form") {
    ModelParams lab{1.0, 0.0, 1.4, 0.08};
    EvolutionSpec a = make_spec(Frame::full_lab, lab, 24, uniform_grid(1.5, 0.5));
    EvolutionSpec b = make_spec(Frame::slow_qubit, lab, 24, uniform_grid(1.5, 0.5));
    auto [ra, sa] = evolve_collect(a);
    auto [rb, sb] = evolve_collect(b);
    for (size_t k = 0; k < ra.size(); ++k)
        CHECK((ra[k] - rb[k]).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("state stays physical along the way") {
    ModelParams p{1.0, 0.2, 2.0, 0.1};
    EvolutionSpec spec = make_spec(Frame::full_lab, p, 48, {0.0, 1.0, 2.0});
    auto [rhos, stats] = evolve_collect(spec);
    const DensityMatrix& rho = rhos.back();
    CHECK((rho - rho.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho);
    CHECK(es.eigenvalues().minCoeff() > -1e-10);  // positive semidefinite
    CHECK(stats.max_trace_drift < 1e-8);
}

TEST_CASE("halving the step leaves the state unchanged at 1e-8") {
    ModelParams p{1.0, 0.0, 2.0, 0.05};
    EvolutionSpec spec = make_spec(Frame::slow_qubit, p, 48, {0.0, 1.0});
    spec.dt = 1e-3;
    auto [r1, s1] = evolve_collect(spec);
    spec.dt = 5e-4;
    auto [r2, s2] = evolve_collect(spec);
    CHECK((r1.back() - r2.back()).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("observables are invariant under the free-rotation gauge") {
    // Conjugating by exp(-i phi a^dag a) changes coherence phases only; every
    // reported observable must be blind to it.
    ModelParams p{1.0, 0.2, 2.0, 0.1};
    EvolutionSpec spec = make_spec(Frame::full_lab, p, 32, {0.0, 1.3});
    auto [rhos, stats] = evolve_collect(spec);
    const DensityMatrix& rho = rhos.back();
    const int dim = spec.space.dim();
    Eigen::VectorXcd phase(dim);
    for (int i = 0; i < dim; ++i)
        phase(i) = std::polar(1.0, -0.7 * FockSpace::n_of(i));
    DensityMatrix rot = phase.asDiagonal() * rho * phase.conjugate().asDiagonal();
    ObservableSet o1 = measure(rho, spec.space);
    ObservableSet o2 = measure(rot, spec.space);
    CHECK(o1.mean_photon == doctest::Approx(o2.mean_photon).epsilon(1e-12));
    CHECK(o1.p_g == doctest::Approx(o2.p_g).epsilon(1e-12));
    CHECK(o1.purity == doctest::Approx(o2.purity).epsilon(1e-12));
    for (int n = 0; n <= spec.space.n_max; ++n) {
        CHECK(o1.chain_plus[n] == doctest::Approx(o2.chain_plus[n]).epsilon(1e-12));
        CHECK(o1.chain_minus[n] == doctest::Approx(o2.chain_minus[n]).epsilon(1e-12));
    }
}

TEST_CASE("truncation pressure is flagged") {
    ModelParams p{1.0, 0.0, 2.0, 0.01};
    EvolutionSpec spec = make_spec(Frame::slow_qubit, p, 8, {0.0, 2.0});
    auto [rhos, stats] = evolve_collect(spec);
    CHECK(stats.truncation_flagged);
    CHECK(stats.max_top_population > 1e-8);
}

TEST_CASE("steady state detection") {
    SUBCASE("damped driven mode settles onto the fixed point") {
        ModelParams p{1.0, 0.0, 2.0, 0.5};
        EvolutionSpec spec = make_spec(Frame::slow_qubit, p, 40, {0.0, 200.0});
        spec.dt = 2e-3;
        SteadyResult res = steady(spec, 1e-8, 200.0);
        ObservableSet o = measure(res.rho, spec.space);
        const double target = 4.0 * p.g * p.g / (p.kappa * p.kappa + 4.0);
        CHECK(std::abs(o.mean_photon - target) / target < 1e-4);
        CHECK(o.purity == doctest::Approx(0.5).epsilon(1e-4));
        CHECK(res.convergence_time < 100.0);
        CHECK(res.residual < 1e-8);
    }
    SUBCASE("vacuum with no drive is already steady") {
        ModelParams p{1.0, 1.0, 0.0, 0.3};
        EvolutionSpec spec = make_spec(Frame::slow_qubit, p, 8, {0.0, 10.0});
        SteadyResult res = steady(spec, 1e-8, 10.0);
        CHECK(res.convergence_time <= 1.0);
        CHECK(std::abs(res.rho(0, 0).real() - 1.0) < 1e-12);
    }
    SUBCASE("undamped problem is rejected") {
        ModelParams p{1.0, 0.0, 2.0, 0.0};
        EvolutionSpec spec = make_spec(Frame::slow_qubit, p, 8, {0.0, 10.0});
        CHECK_THROWS_AS(steady(spec, 1e-8, 10.0), std::invalid_argument);
    }
    SUBCASE("hopeless tolerance raises the convergence error") {
        ModelParams p{1.0, 0.0, 2.0, 0.2};
        EvolutionSpec spec = make_spec(Frame::slow_qubit, p, 24, {0.0, 1.0});
        CHECK_THROWS_AS(steady(spec, 1e-8, 1.0), convergence_error);
    }
}

}  // TEST_SUITE
