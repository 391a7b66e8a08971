#include "rabi/mcwf.hpp"

#include <cmath>
#include <limits>

#include "rabi/rng.hpp"

namespace rabi {

namespace {

constexpr double kJumpNormTol = 1e-10;
constexpr int kBisectionCap = 200;
constexpr int kBlockSize = 16;
constexpr double kMaxNormDrop = 0.1;

Eigen::VectorXd jump_scale(const FockSpace& space) {
    const int dim = space.dim();
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(std::max(0, dim - 2));
    for (int i = 0; i + 2 < dim; ++i) sq(i) = std::sqrt(double(FockSpace::n_of(i + 2)));
    return sq;
}

// post = a psi / ||a psi||
void apply_jump(const Eigen::VectorXd& sq, const PureState& psi, PureState& post) {
    const int dim = static_cast<int>(psi.size());
    post.setZero();
    post.head(dim - 2).array() = sq.array() * psi.tail(dim - 2).array();
    post.normalize();
}

struct TrajectoryEngine {
    const EvolutionSpec& spec;
    BandedOp heff;
    Eigen::VectorXd sq;
    VectorRk4 rk4;
    Xoshiro256pp rng;
    const TrajectoryHooks& hooks;

    PureState psi, scratch, post;
    double r;  // pre-drawn jump threshold for the current no-jump interval
    TrajectoryResult result;

    TrajectoryEngine(const PureState& psi0, const EvolutionSpec& spec_,
                     std::uint64_t seed, const TrajectoryHooks& hooks_)
        : spec(spec_),
          heff(BandedOp::from_dense(spec_.hamiltonian(), spec_.params.kappa)),
          sq(jump_scale(spec_.space)),
          rng(seed),
          hooks(hooks_),
          psi(psi0),
          scratch(psi0.size()),
          post(psi0.size()) {
        rk4.resize(static_cast<int>(psi0.size()));
        r = rng.uniform_open();
    }

    void record(double t) {
        scratch = psi / psi.norm();
        result.rows.push_back(measure(scratch, spec.space));
        result.t_grid.push_back(t);
    }

    // Advance by h, resolving any jumps inside the step. The squared norm
    // decays monotonically under the drift, so a crossing of the pre-drawn
    // threshold r is bracketed by the step and located by bisection on the
    // substep length.
    void advance(double t0, double h) {
        double remaining = h;
        double t = t0;
        while (remaining > 0.0) {
            const PureState prev = psi;
            const double n2_prev = prev.squaredNorm();
            rk4.step(heff, psi, remaining);
            const double n2 = psi.squaredNorm();
            // The exact squared norm decays monotonically; a large drop means
            // jumps cannot be located reliably, and any rise means the step is
            // outside the integrator's stability region.
            if (std::abs(n2 - n2_prev) > kMaxNormDrop * n2_prev)
                throw std::runtime_error(
                    "mcwf: norm change per step exceeds 0.1; reduce dt");
            if (n2 > r) return;  // no jump in this substep

            // Bisect the crossing time in (0, remaining].
            double lo = 0.0, hi = remaining;
            double mid = remaining;
            for (int it = 0; it < kBisectionCap; ++it) {
                mid = 0.5 * (lo + hi);
                scratch = prev;
                rk4.step(heff, scratch, mid);
                const double f = scratch.squaredNorm() - r;
                if (std::abs(f) < kJumpNormTol) break;
                (f > 0.0 ? lo : hi) = mid;
            }
            psi = scratch;  // state at the jump time (norm^2 ~= r)

            const double t_jump = t + mid;
            apply_jump(sq, psi, post);
            if (hooks.on_jump) {
                scratch = psi / psi.norm();
                hooks.on_jump(t_jump, scratch, post);
            }
            psi = post;
            ++result.jump_count;
            result.jump_times.push_back(t_jump);
            r = rng.uniform_open();
            t = t_jump;
            remaining = (t0 + h) - t_jump;
        }
    }

    void run() {
        record(spec.t_grid.front());
        for (size_t i = 1; i < spec.t_grid.size(); ++i) {
            const double interval = spec.t_grid[i] - spec.t_grid[i - 1];
            const int n_sub =
                std::max(1, static_cast<int>(std::ceil(interval / spec.dt - 1e-9)));
            const double h = interval / n_sub;
            double t = spec.t_grid[i - 1];
            for (int k = 0; k < n_sub; ++k) {
                advance(t, h);
                t += h;
            }
            record(spec.t_grid[i]);
        }
    }
};

// Deterministic blockwise accumulator: per-channel, per-time sums of x and
// x^2 over a fixed block of trajectories, merged pairwise in index order so
// the reduction tree is independent of scheduling.
struct BlockAccumulator {
    Eigen::ArrayXXd sum, sum2;  // (n_channels, n_times)
    long count = 0;

    void init(int n_channels, int n_times) {
        sum = Eigen::ArrayXXd::Zero(n_channels, n_times);
        sum2 = Eigen::ArrayXXd::Zero(n_channels, n_times);
        count = 0;
    }

    void add_sample(const Eigen::ArrayXXd& x) {
        sum += x;
        sum2 += x.square();
        ++count;
    }

    void merge(const BlockAccumulator& other) {
        sum += other.sum;
        sum2 += other.sum2;
        count += other.count;
    }
};

}  // namespace

Operator effective_hamiltonian(const Operator& h, double kappa, const FockSpace& space) {
    if (h.rows() != space.dim() || h.cols() != space.dim())
        throw std::invalid_argument("effective_hamiltonian: dimension mismatch");
    Operator heff = h;
    for (int i = 0; i < space.dim(); ++i)
        heff(i, i) -= cplx(0.0, 0.5 * kappa * FockSpace::n_of(i));
    return heff;
}

TrajectoryResult run_trajectory(const PureState& psi0, const EvolutionSpec& spec,
                                std::uint64_t seed, const TrajectoryHooks& hooks) {
    spec.validate();
    if (psi0.size() != spec.space.dim())
        throw std::invalid_argument("run_trajectory: dimension mismatch");
    if (std::abs(psi0.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("run_trajectory: initial state must be normalized");
    TrajectoryEngine engine(psi0, spec, seed, hooks);
    engine.run();
    return std::move(engine.result);
}

EnsembleResult run_ensemble(const PureState& psi0, const EvolutionSpec& spec,
                            int n_traj, std::uint64_t master_seed, int n_report) {
    if (n_traj < 1) throw std::invalid_argument("run_ensemble: n_traj must be >= 1");
    if (n_report < 0 || n_report > spec.space.n_max)
        throw std::invalid_argument("run_ensemble: n_report out of range");

    const int n_times = static_cast<int>(spec.t_grid.size());
    const int nc = 3 + 2 * (n_report + 1);  // N, p_g, p_e, chains

    std::vector<BlockAccumulator> blocks;
    BlockAccumulator current;
    current.init(nc, n_times);
    Eigen::ArrayXXd x(nc, n_times);

    long total_jumps = 0;
    int min_jumps = std::numeric_limits<int>::max();
    int max_jumps = 0;

    for (int idx = 0; idx < n_traj; ++idx) {
        const TrajectoryResult tr =
            run_trajectory(psi0, spec, trajectory_seed(master_seed, idx));
        for (int k = 0; k < n_times; ++k) {
            const ObservableSet& o = tr.rows[k];
            x(0, k) = o.mean_photon;
            x(1, k) = o.p_g;
            x(2, k) = o.p_e;
            for (int n = 0; n <= n_report; ++n) {
                x(3 + n, k) = o.chain_plus[n];
                x(3 + (n_report + 1) + n, k) = o.chain_minus[n];
            }
        }
        current.add_sample(x);
        total_jumps += tr.jump_count;
        min_jumps = std::min(min_jumps, tr.jump_count);
        max_jumps = std::max(max_jumps, tr.jump_count);
        if (current.count == kBlockSize) {
            blocks.push_back(current);
            current.init(nc, n_times);
        }
    }
    if (current.count > 0) blocks.push_back(current);

    // Pairwise merge in fixed order.
    while (blocks.size() > 1) {
        std::vector<BlockAccumulator> next;
        for (size_t i = 0; i < blocks.size(); i += 2) {
            if (i + 1 < blocks.size()) blocks[i].merge(blocks[i + 1]);
            next.push_back(std::move(blocks[i]));
        }
        blocks.swap(next);
    }
    const BlockAccumulator& total = blocks.front();

    EnsembleResult res;
    res.t_grid = spec.t_grid;
    res.n_traj = n_traj;
    res.master_seed = master_seed;
    res.n_report = n_report;
    res.total_jumps = total_jumps;
    res.mean_jumps = double(total_jumps) / n_traj;
    res.min_jumps = min_jumps;
    res.max_jumps = max_jumps;

    const double n = double(n_traj);
    auto mean_of = [&](int c, int k) { return total.sum(c, k) / n; };
    auto se_of = [&](int c, int k) {
        if (n_traj < 2) return std::numeric_limits<double>::quiet_NaN();
        const double mu = mean_of(c, k);
        const double var = std::max(0.0, (total.sum2(c, k) - n * mu * mu) / (n - 1.0));
        return std::sqrt(var / n);
    };

    res.mean_photon.resize(n_times);
    res.se_photon.resize(n_times);
    res.p_g.resize(n_times);
    res.se_p_g.resize(n_times);
    res.p_e.resize(n_times);
    res.se_p_e.resize(n_times);
    res.chain_plus.assign(n_report + 1, std::vector<double>(n_times));
    res.se_chain_plus.assign(n_report + 1, std::vector<double>(n_times));
    res.chain_minus.assign(n_report + 1, std::vector<double>(n_times));
    res.se_chain_minus.assign(n_report + 1, std::vector<double>(n_times));
    for (int k = 0; k < n_times; ++k) {
        res.mean_photon[k] = mean_of(0, k);
        res.se_photon[k] = se_of(0, k);
        res.p_g[k] = mean_of(1, k);
        res.se_p_g[k] = se_of(1, k);
        res.p_e[k] = mean_of(2, k);
        res.se_p_e[k] = se_of(2, k);
        for (int q = 0; q <= n_report; ++q) {
            res.chain_plus[q][k] = mean_of(3 + q, k);
            res.se_chain_plus[q][k] = se_of(3 + q, k);
            res.chain_minus[q][k] = mean_of(3 + (n_report + 1) + q, k);
            res.se_chain_minus[q][k] = se_of(3 + (n_report + 1) + q, k);
        }
    }
    return res;
}

}  // namespace rabi
