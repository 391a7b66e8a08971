#include "rabi/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "rabi/analytic.hpp"
#include "rabi/mcwf.hpp"
#include "rabi/mesolve.hpp"
#include "rabi/observables.hpp"
#include "rabi/version.hpp"

namespace rabi::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_set(double v) { return v != RunConfig::kUnset; }

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

std::pair<int, int> parse_initial(const std::string& text, int n_max) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("initial must look like \"g,0\" or \"e,2\"");
    const std::string level = text.substr(0, comma);
    int s;
    if (level == "g") s = 0;
    else if (level == "e") s = 1;
    else throw std::invalid_argument("initial qubit label must be g or e");
    int n;
    try {
        size_t used = 0;
        n = std::stoi(text.substr(comma + 1), &used);
        if (used != text.size() - comma - 1) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("initial fock level must be an integer");
    }
    if (n < 0 || n > n_max)
        throw std::invalid_argument("initial fock level out of range for n_max");
    return {s, n};
}

// ---------------------------------------------------------------- CSV rows

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const {
        for (size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        throw std::invalid_argument("no column named " + name);
    }
};

void write_csv(const fs::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string());
    for (size_t i = 0; i < table.header.size(); ++i)
        out << (i ? "," : "") << table.header[i];
    out << "\n";
    for (const auto& row : table.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << fmt17(row[i]);
        out << "\n";
    }
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty csv");
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        while (std::getline(rs, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != table.header.size())
            throw std::invalid_argument("ragged csv row in " + path.string());
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<std::string> schema_columns(int n_report, bool with_stderr) {
    std::vector<std::string> cols = {"tau", "mean_photon", "p_g", "p_e", "purity"};
    for (int n = 0; n <= n_report; ++n) cols.push_back("chain_plus_" + std::to_string(n));
    for (int n = 0; n <= n_report; ++n) cols.push_back("chain_minus_" + std::to_string(n));
    if (with_stderr) {
        cols.push_back("se_mean_photon");
        cols.push_back("se_p_g");
        cols.push_back("se_p_e");
        for (int n = 0; n <= n_report; ++n) cols.push_back("se_chain_plus_" + std::to_string(n));
        for (int n = 0; n <= n_report; ++n) cols.push_back("se_chain_minus_" + std::to_string(n));
    }
    return cols;
}

// ------------------------------------------------------------- engine runs

struct RunArtifacts {
    CsvTable table;
    json diagnostics = json::object();
    bool truncation_flagged = false;
};

std::vector<double> observable_row(double tau, const ObservableSet& o, int n_report) {
    std::vector<double> row = {tau, o.mean_photon, o.p_g, o.p_e, o.purity};
    for (int n = 0; n <= n_report; ++n) row.push_back(o.chain_plus[n]);
    for (int n = 0; n <= n_report; ++n) row.push_back(o.chain_minus[n]);
    return row;
}

RunArtifacts run_analytic(const RunConfig& cfg) {
    const auto [s, n] = parse_initial(cfg.initial, cfg.n_max);
    if (n != 0)
        throw std::invalid_argument(
            "analytic engine starts from the mode vacuum; initial must be g,0 or e,0");
    AnalyticModel m{cfg.g_over_omega, cfg.resolved_delta(), cfg.kappa_over_omega,
                    s == 0 ? QubitInit::ground : QubitInit::excited};
    m.validate();

    RunArtifacts art;
    art.table.header = schema_columns(cfg.n_report, false);
    for (double tau : cfg.grid()) {
        ObservableSet o;
        o.mean_photon = mean_photon(m, tau);
        std::tie(o.p_g, o.p_e) = qubit_populations(m, tau);
        o.purity = purity(m, tau);
        o.chain_plus.resize(cfg.n_report + 1);
        o.chain_minus.resize(cfg.n_report + 1);
        for (int q = 0; q <= cfg.n_report; ++q) {
            o.chain_plus[q] = chain_prob(m, tau, ChainParity::plus, q);
            o.chain_minus[q] = chain_prob(m, tau, ChainParity::minus, q);
        }
        art.table.rows.push_back(observable_row(tau, o, cfg.n_report));
    }
    if (cfg.kappa_over_omega > 0.0) {
        const SteadyInfo st = steady_state(m);
        art.diagnostics["steady_mean_photon"] = st.mean_photon_s;
        art.diagnostics["steady_energy"] = st.energy_s;
    }
    return art;
}

EvolutionSpec spec_from_config(const RunConfig& cfg) {
    EvolutionSpec spec;
    spec.mode = cfg.hamiltonian_mode == "full_lab" ? Frame::full_lab : Frame::slow_qubit;
    spec.params = cfg.to_params();
    spec.space.n_max = cfg.n_max;
    spec.t_grid = cfg.steady ? std::vector<double>{0.0, cfg.steady_tmax} : cfg.grid();
    spec.dt = cfg.dt;
    const auto [s, n] = parse_initial(cfg.initial, cfg.n_max);
    spec.initial = basis_state_density(spec.space, s, n);
    return spec;
}

RunArtifacts run_mesolve(const RunConfig& cfg) {
    RunArtifacts art;
    art.table.header = schema_columns(cfg.n_report, false);

    if (cfg.steady) {
        EvolutionSpec spec = spec_from_config(cfg);
        const SteadyResult res = steady(spec, cfg.steady_eps, cfg.steady_tmax);
        const ObservableSet o = measure(res.rho, spec.space);
        art.table.rows.push_back(observable_row(res.convergence_time, o, cfg.n_report));
        art.diagnostics["convergence_time"] = res.convergence_time;
        art.diagnostics["residual"] = res.residual;
        return art;
    }

    EvolutionSpec spec = spec_from_config(cfg);
    const EvolveStats stats =
        evolve(spec, [&](double t, const DensityMatrix& rho) {
            art.table.rows.push_back(
                observable_row(t, measure(rho, spec.space), cfg.n_report));
        });
    art.diagnostics["max_trace_drift"] = stats.max_trace_drift;
    art.diagnostics["max_top_population"] = stats.max_top_population;
    art.diagnostics["truncation_flagged"] = stats.truncation_flagged;
    art.truncation_flagged = stats.truncation_flagged;
    return art;
}

RunArtifacts run_mcwf(const RunConfig& cfg) {
    EvolutionSpec spec = spec_from_config(cfg);
    const auto [s, n] = parse_initial(cfg.initial, cfg.n_max);
    const PureState psi0 = basis_state(spec.space, s, n);
    const EnsembleResult ens =
        run_ensemble(psi0, spec, cfg.n_traj, cfg.master_seed, cfg.n_report);

    RunArtifacts art;
    art.table.header = schema_columns(cfg.n_report, true);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (size_t k = 0; k < ens.t_grid.size(); ++k) {
        std::vector<double> row = {ens.t_grid[k], ens.mean_photon[k], ens.p_g[k],
                                   ens.p_e[k], nan};  // ensemble purity not estimated
        for (int q = 0; q <= cfg.n_report; ++q) row.push_back(ens.chain_plus[q][k]);
        for (int q = 0; q <= cfg.n_report; ++q) row.push_back(ens.chain_minus[q][k]);
        row.push_back(ens.se_photon[k]);
        row.push_back(ens.se_p_g[k]);
        row.push_back(ens.se_p_e[k]);
        for (int q = 0; q <= cfg.n_report; ++q) row.push_back(ens.se_chain_plus[q][k]);
        for (int q = 0; q <= cfg.n_report; ++q) row.push_back(ens.se_chain_minus[q][k]);
        art.table.rows.push_back(std::move(row));
    }
    art.diagnostics["mean_jumps"] = ens.mean_jumps;
    art.diagnostics["min_jumps"] = ens.min_jumps;
    art.diagnostics["max_jumps"] = ens.max_jumps;
    art.diagnostics["total_jumps"] = ens.total_jumps;
    if (cfg.n_traj < 2) art.diagnostics["stderr_defined"] = false;
    return art;
}

json config_to_json(const RunConfig& cfg) {
    json j;
    j["engine"] = cfg.engine;
    j["hamiltonian_mode"] = cfg.hamiltonian_mode;
    j["g_over_omega"] = cfg.g_over_omega;
    j["kappa_over_omega"] = cfg.kappa_over_omega;
    j["delta_over_omega"] = cfg.resolved_delta();
    j["omega0_over_omega"] = 1.0 - cfg.resolved_delta();
    if (!cfg.steady) {
        j["tau_max"] = cfg.tau_max;
        j["tau_step"] = cfg.tau_step;
    }
    j["n_max"] = cfg.n_max;
    j["n_report"] = cfg.n_report;
    j["initial"] = cfg.initial;
    j["dt"] = cfg.dt;
    if (cfg.engine == "mcwf") {
        j["n_traj"] = cfg.n_traj;
        j["master_seed"] = cfg.master_seed;
    }
    if (cfg.steady) {
        j["steady"] = true;
        j["steady_eps"] = cfg.steady_eps;
        j["steady_tmax"] = cfg.steady_tmax;
    }
    j["output"] = cfg.output;
    return j;
}

}  // namespace

// ----------------------------------------------------------------- config

void RunConfig::validate() const {
    static const std::set<std::string> engines = {"analytic", "mesolve", "mcwf"};
    static const std::set<std::string> modes = {"slow_qubit", "full_lab"};
    if (!engines.count(engine))
        throw std::invalid_argument("engine must be analytic, mesolve, or mcwf");
    if (!modes.count(hamiltonian_mode))
        throw std::invalid_argument("hamiltonian_mode must be slow_qubit or full_lab");
    if (is_set(delta_over_omega) == is_set(omega0_over_omega))
        throw std::invalid_argument(
            "exactly one of delta_over_omega / omega0_over_omega must be given");
    const double delta = resolved_delta();
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("delta_over_omega must lie in [0, 1]");
    if (!(g_over_omega >= 0.0)) throw std::invalid_argument("g_over_omega must be >= 0");
    if (!(kappa_over_omega >= 0.0))
        throw std::invalid_argument("kappa_over_omega must be >= 0");
    if (steady) {
        if (engine != "mesolve")
            throw std::invalid_argument("steady mode requires engine=mesolve");
        if (!(steady_eps > 0.0) || !(steady_tmax > 0.0))
            throw std::invalid_argument("steady_eps and steady_tmax must be positive");
    } else {
        if (!is_set(tau_max) || !(tau_max > 0.0))
            throw std::invalid_argument("tau_max must be set and positive");
        if (!(tau_step > 0.0)) throw std::invalid_argument("tau_step must be positive");
    }
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if (n_report < 0 || n_report > n_max)
        throw std::invalid_argument("n_report must lie in [0, n_max]");
    if (engine == "mcwf" && n_traj < 1)
        throw std::invalid_argument("n_traj must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (output.empty()) throw std::invalid_argument("output path must be non-empty");
    parse_initial(initial, n_max);
}

double RunConfig::resolved_delta() const {
    if (is_set(delta_over_omega)) return delta_over_omega;
    if (is_set(omega0_over_omega)) return 1.0 - omega0_over_omega;
    throw std::invalid_argument("detuning not specified");
}

ModelParams RunConfig::to_params() const {
    ModelParams p;
    p.omega = 1.0;
    p.omega0 = 1.0 - resolved_delta();
    p.g = g_over_omega;
    p.kappa = kappa_over_omega;
    return p;
}

std::vector<double> RunConfig::grid() const {
    std::vector<double> taus;
    const long n = std::lround(std::floor(tau_max / tau_step + 1e-9));
    taus.reserve(n + 1);
    for (long k = 0; k <= n; ++k) taus.push_back(k * tau_step);
    if (tau_max - taus.back() > 1e-9 * std::max(1.0, tau_max)) taus.push_back(tau_max);
    return taus;
}

RunConfig config_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    static const std::set<std::string> known = {
        "engine", "hamiltonian_mode", "g_over_omega", "kappa_over_omega",
        "delta_over_omega", "omega0_over_omega", "tau_max", "tau_step",
        "n_max", "n_traj", "master_seed", "n_report", "output", "initial",
        "dt", "steady", "steady_eps", "steady_tmax"};
    RunConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (!known.count(key)) throw std::invalid_argument("unknown config key: " + key);
            if (key == "engine") cfg.engine = value.get<std::string>();
            else if (key == "hamiltonian_mode") cfg.hamiltonian_mode = value.get<std::string>();
            else if (key == "g_over_omega") cfg.g_over_omega = value.get<double>();
            else if (key == "kappa_over_omega") cfg.kappa_over_omega = value.get<double>();
            else if (key == "delta_over_omega") cfg.delta_over_omega = value.get<double>();
            else if (key == "omega0_over_omega") cfg.omega0_over_omega = value.get<double>();
            else if (key == "tau_max") cfg.tau_max = value.get<double>();
            else if (key == "tau_step") cfg.tau_step = value.get<double>();
            else if (key == "n_max") cfg.n_max = value.get<int>();
            else if (key == "n_traj") cfg.n_traj = value.get<int>();
            else if (key == "master_seed") cfg.master_seed = value.get<std::uint64_t>();
            else if (key == "n_report") cfg.n_report = value.get<int>();
            else if (key == "output") cfg.output = value.get<std::string>();
            else if (key == "initial") cfg.initial = value.get<std::string>();
            else if (key == "dt") cfg.dt = value.get<double>();
            else if (key == "steady") cfg.steady = value.get<bool>();
            else if (key == "steady_eps") cfg.steady_eps = value.get<double>();
            else if (key == "steady_tmax") cfg.steady_tmax = value.get<double>();
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad config value: ") + e.what());
    }
    return cfg;
}

RunConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

// ------------------------------------------------------------------- runs

void run_config(const RunConfig& cfg,
                const std::map<std::string, std::string>& chosen_notes) {
    cfg.validate();
    RunArtifacts art;
    if (cfg.engine == "analytic") art = run_analytic(cfg);
    else if (cfg.engine == "mesolve") art = run_mesolve(cfg);
    else art = run_mcwf(cfg);

    const fs::path csv_path(cfg.output);
    if (csv_path.has_parent_path()) fs::create_directories(csv_path.parent_path());
    write_csv(csv_path, art.table);

    json sidecar;
    sidecar["schema_version"] = kSchemaVersion;
    sidecar["code_version"] = kVersion;
    sidecar["config"] = config_to_json(cfg);
    sidecar["columns"] = art.table.header;
    sidecar["diagnostics"] = art.diagnostics;
    if (!chosen_notes.empty()) {
        json chosen = json::object();
        for (const auto& [k, v] : chosen_notes) chosen[k] = v;
        sidecar["chosen"] = chosen;
    }
    fs::path meta_path = csv_path;
    meta_path += ".json";
    std::ofstream meta(meta_path);
    if (!meta) throw std::runtime_error("cannot open " + meta_path.string());
    meta << sidecar.dump(2) << "\n";
    meta.close();

    if (art.truncation_flagged)
        throw truncation_error("top Fock levels exceeded tolerance; raise n_max "
                               "(outputs were written, see sidecar diagnostics)");
}

// ---------------------------------------------------------------- figures

std::vector<RunConfig> figure_runs(int preset_id, const std::string& out_dir,
                                   std::map<std::string, std::string>& chosen_notes) {
    auto base = [&](const std::string& name) {
        RunConfig cfg;
        cfg.engine = "analytic";
        cfg.g_over_omega = 2.0;
        cfg.kappa_over_omega = 0.01;
        cfg.delta_over_omega = 1.0;
        cfg.tau_step = 0.05;
        cfg.output = (fs::path(out_dir) / (name + ".csv")).string();
        return cfg;
    };
    std::vector<RunConfig> runs;
    const std::vector<double> ladder = {0.75, 0.5, 0.25, 0.0};

    switch (preset_id) {
        case 1: {
            for (double g : {0.5, 1.0, 2.0, 3.0}) {
                RunConfig cfg = base("fig1_g" + fmt_short(g));
                cfg.g_over_omega = g;
                cfg.tau_max = 12.0 * kPi;
                runs.push_back(cfg);
            }
            chosen_notes["g_over_omega"] = "values {0.5,1,2,3} chosen (caption leaves them unstated)";
            chosen_notes["tau_max"] = "12*pi chosen";
            break;
        }
        case 2: {
            RunConfig cfg = base("fig2_analytic");
            cfg.tau_max = 12.0 * kPi;
            runs.push_back(cfg);
            chosen_notes["tau_max"] = "12*pi chosen";
            break;
        }
        case 3: {
            RunConfig cfg = base("fig3_snapshots");
            cfg.tau_step = kPi;
            cfg.tau_max = 12.0 * kPi;  // rows are the snapshots tau_l = pi*l, l = 0..12
            runs.push_back(cfg);
            break;
        }
        case 4: {
            RunConfig cfg = base("fig4_steady_approach");
            cfg.kappa_over_omega = 0.2;
            cfg.tau_max = 60.0;
            runs.push_back(cfg);
            chosen_notes["tau_max"] = "60 chosen (steady approach window)";
            break;
        }
        case 5: {
            RunConfig ana = base("fig5_analytic");
            ana.tau_max = 12.0;
            runs.push_back(ana);
            RunConfig mc = base("fig5_mcwf_delta0.8");
            mc.engine = "mcwf";
            mc.hamiltonian_mode = "full_lab";
            mc.delta_over_omega = 0.8;
            mc.tau_max = 12.0;
            runs.push_back(mc);
            chosen_notes["tau_max"] = "12 chosen";
            chosen_notes["n_traj"] = "1000 chosen (trajectory count unstated)";
            break;
        }
        case 6: {
            for (double d : ladder) {
                RunConfig cfg = base("fig6_mesolve_delta" + fmt_short(d));
                cfg.engine = "mesolve";
                cfg.hamiltonian_mode = "full_lab";
                cfg.delta_over_omega = d;
                cfg.tau_max = 12.0 * kPi;
                runs.push_back(cfg);
            }
            chosen_notes["delta_over_omega"] =
                "panel values {0.75,0.5,0.25,0} chosen (caption leaves them unstated)";
            chosen_notes["engine"] = "mesolve chosen for the numerical curves";
            chosen_notes["tau_max"] = "12*pi chosen";
            break;
        }
        case 7: {
            RunConfig ana = base("fig7_analytic");
            ana.tau_max = 12.0;
            runs.push_back(ana);
            for (double d : ladder) {
                RunConfig cfg = base("fig7_mesolve_delta" + fmt_short(d));
                cfg.engine = "mesolve";
                cfg.hamiltonian_mode = "full_lab";
                cfg.delta_over_omega = d;
                cfg.tau_max = 12.0;
                runs.push_back(cfg);
            }
            chosen_notes["engine"] = "mesolve chosen for the numerical curves";
            chosen_notes["tau_max"] = "12 chosen";
            break;
        }
        case 8: {
            for (double kappa : {0.3, 0.5, 1.0}) {
                RunConfig ana = base("fig8_kappa" + fmt_short(kappa) + "_analytic");
                ana.kappa_over_omega = kappa;
                ana.tau_max = 30.0;
                runs.push_back(ana);
                for (double d : ladder) {
                    RunConfig cfg = base("fig8_kappa" + fmt_short(kappa) + "_delta" + fmt_short(d));
                    cfg.engine = "mesolve";
                    cfg.hamiltonian_mode = "full_lab";
                    cfg.kappa_over_omega = kappa;
                    cfg.delta_over_omega = d;
                    cfg.tau_max = 30.0;
                    runs.push_back(cfg);
                }
            }
            chosen_notes["engine"] = "mesolve chosen for the numerical curves";
            chosen_notes["tau_max"] = "30 chosen";
            break;
        }
        default:
            throw std::invalid_argument("figure preset id must be 1..8");
    }
    return runs;
}

// ---------------------------------------------------------------- compare

double compare_csv(const std::string& csv_a, const std::string& csv_b,
                   const std::string& column, CompareMetric metric,
                   double tau_star, bool interpolate) {
    const CsvTable a = read_csv(csv_a);
    const CsvTable b = read_csv(csv_b);
    const int ca = a.column(column);
    const int cb = b.column(column);
    const int ta = a.column("tau");
    const int tb = b.column("tau");

    auto b_value_at = [&](double tau) {
        if (!interpolate) {
            for (const auto& row : b.rows)
                if (std::abs(row[tb] - tau) < 1e-9) return row[cb];
            throw std::invalid_argument(
                "tau grids differ; pass interpolate to resample");
        }
        if (tau <= b.rows.front()[tb]) return b.rows.front()[cb];
        for (size_t i = 1; i < b.rows.size(); ++i) {
            const double t0 = b.rows[i - 1][tb], t1 = b.rows[i][tb];
            if (tau <= t1) {
                const double w = (tau - t0) / (t1 - t0);
                return (1.0 - w) * b.rows[i - 1][cb] + w * b.rows[i][cb];
            }
        }
        return b.rows.back()[cb];
    };

    if (metric == CompareMetric::max_abs) {
        if (!interpolate && a.rows.size() != b.rows.size())
            throw std::invalid_argument("tau grids differ; pass interpolate to resample");
        double worst = 0.0;
        for (const auto& row : a.rows)
            worst = std::max(worst, std::abs(row[ca] - b_value_at(row[ta])));
        return worst;
    }

    // rel_at_tau: reference value from file A at the grid point nearest tau_star.
    size_t best = 0;
    double best_gap = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < a.rows.size(); ++i) {
        const double gap = std::abs(a.rows[i][ta] - tau_star);
        if (gap < best_gap) {
            best_gap = gap;
            best = i;
        }
    }
    const double ref = a.rows[best][ca];
    if (ref == 0.0) throw std::invalid_argument("reference value at tau* is zero");
    return std::abs(ref - b_value_at(a.rows[best][ta])) / std::abs(ref);
}

// ------------------------------------------------------------ entry point

int execute(const std::vector<std::string>& args) {
    CLI::App app{"dissipative qubit-mode simulation toolkit"};
    app.set_version_flag("--version", std::string("rabi ") + kVersion +
                                          " (schema " + std::to_string(kSchemaVersion) + ")");
    app.require_subcommand(1);

    // run -------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "execute one configured run");
    std::string config_path;
    run_cmd->add_option("--config", config_path, "JSON config file");
    RunConfig flags;
    auto* o_engine = run_cmd->add_option("--engine", flags.engine);
    auto* o_mode = run_cmd->add_option("--hamiltonian_mode", flags.hamiltonian_mode);
    auto* o_g = run_cmd->add_option("--g_over_omega", flags.g_over_omega);
    auto* o_kappa = run_cmd->add_option("--kappa_over_omega", flags.kappa_over_omega);
    auto* o_delta = run_cmd->add_option("--delta_over_omega", flags.delta_over_omega);
    auto* o_omega0 = run_cmd->add_option("--omega0_over_omega", flags.omega0_over_omega);
    auto* o_tau_max = run_cmd->add_option("--tau_max", flags.tau_max);
    auto* o_tau_step = run_cmd->add_option("--tau_step", flags.tau_step);
    auto* o_n_max = run_cmd->add_option("--n_max", flags.n_max);
    auto* o_n_traj = run_cmd->add_option("--n_traj", flags.n_traj);
    auto* o_seed = run_cmd->add_option("--master_seed", flags.master_seed);
    auto* o_n_report = run_cmd->add_option("--n_report", flags.n_report);
    auto* o_output = run_cmd->add_option("--output", flags.output);
    auto* o_initial = run_cmd->add_option("--initial", flags.initial);
    auto* o_dt = run_cmd->add_option("--dt", flags.dt);
    auto* o_steady = run_cmd->add_flag("--steady", flags.steady);
    auto* o_seps = run_cmd->add_option("--steady_eps", flags.steady_eps);
    auto* o_stmax = run_cmd->add_option("--steady_tmax", flags.steady_tmax);

    // figure ----------------------------------------------------------
    auto* fig_cmd = app.add_subcommand("figure", "emit the CSVs behind a preset figure");
    int fig_id = 0;
    std::string fig_out = "figures";
    bool dry_run = false;
    fig_cmd->add_option("id", fig_id, "figure id (1..8)")->required();
    fig_cmd->add_option("--out", fig_out, "output directory");
    fig_cmd->add_flag("--dry-run", dry_run, "write sidecar configs only, run nothing");

    // compare ---------------------------------------------------------
    auto* cmp_cmd = app.add_subcommand("compare", "compare a column of two run CSVs");
    std::string cmp_a, cmp_b, cmp_col = "mean_photon", cmp_metric = "max_abs";
    double cmp_tau = 0.0;
    bool cmp_interp = false;
    cmp_cmd->add_option("csv_a", cmp_a)->required();
    cmp_cmd->add_option("csv_b", cmp_b)->required();
    cmp_cmd->add_option("--column", cmp_col);
    cmp_cmd->add_option("--metric", cmp_metric)
        ->check(CLI::IsMember({"max_abs", "rel_at_tau"}));
    cmp_cmd->add_option("--tau", cmp_tau, "evaluation time for rel_at_tau");
    cmp_cmd->add_flag("--interpolate", cmp_interp);

    // sweep -------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand("sweep", "run a config across parameter values");
    std::string sweep_config, sweep_param, sweep_out = "sweep";
    std::vector<std::string> sweep_values;
    sweep_cmd->add_option("--config", sweep_config, "base JSON config")->required();
    sweep_cmd->add_option("--param", sweep_param, "config key to vary")->required();
    sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
        ->required()
        ->delimiter(',');
    sweep_cmd->add_option("--out", sweep_out, "output directory");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    }

    try {
        if (run_cmd->parsed()) {
            RunConfig cfg =
                config_path.empty() ? RunConfig{} : config_from_json_file(config_path);
            if (o_engine->count()) cfg.engine = flags.engine;
            if (o_mode->count()) cfg.hamiltonian_mode = flags.hamiltonian_mode;
            if (o_g->count()) cfg.g_over_omega = flags.g_over_omega;
            if (o_kappa->count()) cfg.kappa_over_omega = flags.kappa_over_omega;
            if (o_delta->count()) {
                cfg.delta_over_omega = flags.delta_over_omega;
                cfg.omega0_over_omega = RunConfig::kUnset;
            }
            if (o_omega0->count()) {
                cfg.omega0_over_omega = flags.omega0_over_omega;
                cfg.delta_over_omega = RunConfig::kUnset;
            }
            if (o_tau_max->count()) cfg.tau_max = flags.tau_max;
            if (o_tau_step->count()) cfg.tau_step = flags.tau_step;
            if (o_n_max->count()) cfg.n_max = flags.n_max;
            if (o_n_traj->count()) cfg.n_traj = flags.n_traj;
            if (o_seed->count()) cfg.master_seed = flags.master_seed;
            if (o_n_report->count()) cfg.n_report = flags.n_report;
            if (o_output->count()) cfg.output = flags.output;
            if (o_initial->count()) cfg.initial = flags.initial;
            if (o_dt->count()) cfg.dt = flags.dt;
            if (o_steady->count()) cfg.steady = flags.steady;
            if (o_seps->count()) cfg.steady_eps = flags.steady_eps;
            if (o_stmax->count()) cfg.steady_tmax = flags.steady_tmax;
            run_config(cfg);
            return 0;
        }
        if (fig_cmd->parsed()) {
            std::map<std::string, std::string> chosen;
            const std::vector<RunConfig> runs = figure_runs(fig_id, fig_out, chosen);
            for (const RunConfig& cfg : runs) {
                if (dry_run) {
                    cfg.validate();
                    const fs::path csv_path(cfg.output);
                    if (csv_path.has_parent_path())
                        fs::create_directories(csv_path.parent_path());
                    json sidecar;
                    sidecar["schema_version"] = kSchemaVersion;
                    sidecar["code_version"] = kVersion;
                    sidecar["config"] = config_to_json(cfg);
                    json ch = json::object();
                    for (const auto& [k, v] : chosen) ch[k] = v;
                    sidecar["chosen"] = ch;
                    sidecar["dry_run"] = true;
                    fs::path meta_path = csv_path;
                    meta_path += ".json";
                    std::ofstream meta(meta_path);
                    meta << sidecar.dump(2) << "\n";
                } else {
                    run_config(cfg, chosen);
                }
            }
            return 0;
        }
        if (cmp_cmd->parsed()) {
            const CompareMetric metric = cmp_metric == "max_abs"
                                             ? CompareMetric::max_abs
                                             : CompareMetric::rel_at_tau;
            const double value =
                compare_csv(cmp_a, cmp_b, cmp_col, metric, cmp_tau, cmp_interp);
            std::cout << fmt17(value) << "\n";
            return 0;
        }
        if (sweep_cmd->parsed()) {
            std::ifstream in(sweep_config);
            if (!in) throw std::invalid_argument("cannot open config file " + sweep_config);
            std::stringstream buf;
            buf << in.rdbuf();
            json base_json = json::parse(buf.str(), nullptr, false);
            if (base_json.is_discarded())
                throw std::invalid_argument("config is not valid JSON");
            json manifest = json::array();
            for (const std::string& value : sweep_values) {
                json patched = base_json;
                char* end = nullptr;
                const double num = std::strtod(value.c_str(), &end);
                if (end && *end == '\0' && end != value.c_str())
                    patched[sweep_param] = num;
                else
                    patched[sweep_param] = value;
                const std::string name = sweep_param + "_" + value;
                patched["output"] = (fs::path(sweep_out) / (name + ".csv")).string();
                RunConfig cfg = config_from_json_text(patched.dump());
                run_config(cfg);
                manifest.push_back(patched);
            }
            fs::create_directories(sweep_out);
            std::ofstream mf(fs::path(sweep_out) / "manifest.json");
            mf << manifest.dump(2) << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const truncation_error& e) {
        std::cerr << "truncation violation: " << e.what() << "\n";
        return 3;
    } catch (const convergence_error& e) {
        std::cerr << "non-convergence: " << e.what() << "\n";
        return 4;
    }
    return 0;
}

}  // namespace rabi::cli
