#include "rabi/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace rabi {

namespace {

constexpr cplx kI{0.0, 1.0};

double sign_of(QubitInit init) { return init == QubitInit::ground ? 1.0 : -1.0; }

// Exponent E(t) with F(t) = exp(-E); organized so g = 0 and kappa = 0 stay
// exact (no division by g).
double decoherence_exponent(const AnalyticModel& m, double t) {
    const cplx z  = m.z();
    const double z2 = std::norm(z);
    const cplx b  = beta(m, t);
    return (2.0 * m.g * m.g / z2) * m.kappa * t
         + (4.0 * m.g / z2) * std::imag(std::conj(z) * b);
}

// log(|beta|^{2n} / n!) evaluated stably; -inf for beta = 0, n > 0.
double log_poisson_weight(double beta_sq, int n) {
    if (beta_sq == 0.0) return n == 0 ? 0.0 : -HUGE_VAL;
    return n * std::log(beta_sq) - std::lgamma(n + 1.0);
}

}  // namespace

void AnalyticModel::validate() const {
    if (!(g >= 0.0)) throw std::invalid_argument("g must be non-negative");
    if (!(kappa >= 0.0)) throw std::invalid_argument("kappa must be non-negative");
    if (kappa == 0.0 && delta == 0.0)
        throw std::invalid_argument(
            "kappa and delta cannot both vanish: the resonant undamped "
            "amplitude grows without bound");
}

AnalyticModel AnalyticModel::from_params(const ModelParams& p, QubitInit init) {
    p.validate();
    AnalyticModel m{p.g, p.delta(), p.kappa, init};
    m.validate();
    return m;
}

cplx beta(const AnalyticModel& m, double t) {
    m.validate();
    if (t < 0.0) throw std::invalid_argument("t must be non-negative");
    const cplx z = m.z();
    return (kI * m.g / z) * (std::exp(-z * t) - 1.0);
}

double decoherence(const AnalyticModel& m, double t) {
    if (t < 0.0) throw std::invalid_argument("t must be non-negative");
    return std::exp(-decoherence_exponent(m, t));
}

AnalyticSnapshot snapshot(const AnalyticModel& m, double t) {
    return {t, beta(m, t), decoherence(m, t)};
}

double joint_prob(const AnalyticModel& m, double t, int level, int n) {
    if (level != 0 && level != 1) throw std::invalid_argument("level must be 0 (g) or 1 (e)");
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    const double b2 = std::norm(beta(m, t));
    // G = F e^{2|beta|^2}, fused in the exponent to avoid cancellation.
    const double gg = sign_of(m.initial) * std::exp(2.0 * b2 - decoherence_exponent(m, t));
    const double level_sign = (level == 0) ? 1.0 : -1.0;
    const double n_sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double w = std::exp(-b2 + log_poisson_weight(b2, n));
    return std::max(0.0, 0.5 * w * (1.0 + level_sign * n_sign * gg));
}

double purity(const AnalyticModel& m, double t) {
    const double b2 = std::norm(beta(m, t));
    const double gg = std::exp(2.0 * b2 - decoherence_exponent(m, t));
    return 0.5 * (1.0 + gg * gg);
}

std::pair<double, double> qubit_populations(const AnalyticModel& m, double t) {
    const double f = sign_of(m.initial) * decoherence(m, t);
    return {0.5 * (1.0 + f), 0.5 * (1.0 - f)};
}

double photon_dist(const AnalyticModel& m, double t, int n) {
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    const double b2 = std::norm(beta(m, t));
    return std::exp(-b2 + log_poisson_weight(b2, n));
}

double mean_photon(const AnalyticModel& m, double t) {
    return std::norm(beta(m, t));
}

double chain_prob(const AnalyticModel& m, double t, ChainParity parity, int n) {
    if (n < 0) throw std::invalid_argument("n must be non-negative");
    const double b2 = std::norm(beta(m, t));
    const double p0 = joint_prob(m, t, parity == ChainParity::plus ? 0 : 1, 0);
    if (p0 == 0.0) return 0.0;
    return std::exp(log_poisson_weight(b2, n) + std::log(p0));
}

SteadyInfo steady_state(const AnalyticModel& m) {
    m.validate();
    if (!(m.kappa > 0.0))
        throw std::invalid_argument("steady state requires kappa > 0");
    const cplx bs = -kI * m.g / m.z();
    const double b2 = std::norm(bs);
    return {bs, b2, m.delta * b2 + m.g * 2.0 * std::real(bs)};
}

namespace {

// Fock expansion of a coherent state |beta>, truncated at n_max.
Eigen::VectorXcd coherent_vector(cplx b, int n_max) {
    Eigen::VectorXcd v(n_max + 1);
    const double b2 = std::norm(b);
    if (b2 == 0.0) {
        v.setZero();
        v(0) = 1.0;
        return v;
    }
    const double r = std::abs(b);
    const double th = std::arg(b);
    for (int n = 0; n <= n_max; ++n) {
        const double lg = -0.5 * b2 + n * std::log(r) - 0.5 * std::lgamma(n + 1.0);
        v(n) = std::exp(lg) * std::exp(kI * (th * double(n)));
    }
    return v;
}

}  // namespace

DensityMatrix density_matrix(const AnalyticModel& m, double t,
                             const FockSpace& space, double tail_tol) {
    space.validate();
    const cplx b = beta(m, t);
    const double b2 = std::norm(b);
    const Eigen::VectorXcd cp = coherent_vector(b, space.n_max);
    const Eigen::VectorXcd cm = coherent_vector(-b, space.n_max);
    const double tail = 1.0 - cp.squaredNorm();
    if (tail > tail_tol)
        throw truncation_error("coherent-state tail beyond n_max exceeds tolerance");

    const double gg = sign_of(m.initial) * std::exp(2.0 * b2 - decoherence_exponent(m, t));
    // sigma_x sector blocks on the mode factor.
    const Eigen::MatrixXcd rpp = 0.5 * (cp * cp.adjoint());
    const Eigen::MatrixXcd rmm = 0.5 * (cm * cm.adjoint());
    const Eigen::MatrixXcd rpm = 0.5 * gg * (cp * cm.adjoint());

    const int dim = space.dim();
    DensityMatrix rho = DensityMatrix::Zero(dim, dim);
    // |+> = (|g> + |e>)/sqrt(2), |-> = (|g> - |e>)/sqrt(2): the sector sum
    // rho_pp + rho_mm enters every qubit block with weight 1/2; coherences
    // pick up signs from the minus component.
    for (int sa = 0; sa < 2; ++sa) {
        for (int sb = 0; sb < 2; ++sb) {
            const double mp = (sa == 1) ? -1.0 : 1.0;  // sign of |-> at row s
            const double mq = (sb == 1) ? -1.0 : 1.0;
            const Eigen::MatrixXcd block =
                0.5 * (rpp + mp * mq * rmm + mq * rpm + mp * rpm.adjoint());
            for (int n = 0; n <= space.n_max; ++n)
                for (int q = 0; q <= space.n_max; ++q)
                    rho(space.index_of(n, sa), space.index_of(q, sb)) = block(n, q);
        }
    }
    return rho;
}

cplx char_function(const AnalyticModel& m, double t, cplx alpha, CharSector sector) {
    const cplx b = beta(m, t);
    const double a2h = 0.5 * std::norm(alpha);
    switch (sector) {
        case CharSector::pp:
            return 0.5 * std::exp(-a2h - b * std::conj(alpha) + std::conj(b) * alpha);
        case CharSector::mm:
            return 0.5 * std::exp(-a2h + b * std::conj(alpha) - std::conj(b) * alpha);
        case CharSector::pm: {
            const double f = sign_of(m.initial) * decoherence(m, t);
            return 0.5 * f * std::exp(-a2h - b * std::conj(alpha) - std::conj(b) * alpha);
        }
        case CharSector::mp: {
            const double f = sign_of(m.initial) * decoherence(m, t);
            return 0.5 * f * std::exp(-a2h + b * std::conj(alpha) + std::conj(b) * alpha);
        }
    }
    throw std::invalid_argument("unknown sector");
}

}  // namespace rabi
