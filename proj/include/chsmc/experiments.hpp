#pragma once

// Experiment drivers shared by the command-line tool and the test suites:
// building grids, parameters and initial data from a RunConfig, running the
// experiments, and writing their outputs.

#include "chsmc/config.hpp"
#include "chsmc/diagnostics.hpp"
#include "chsmc/field.hpp"
#include "chsmc/graphs.hpp"
#include "chsmc/smc.hpp"
#include "chsmc/snapshot.hpp"
#include "chsmc/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace chsmc {

/// Ordered key=value summary written to summary.txt.
class Summary {
public:
    void add(const std::string& key, double value) {
        std::ostringstream os;
        os << std::setprecision(std::numeric_limits<double>::max_digits10) << value;
        entries_.emplace_back(key, os.str());
    }
    void add(const std::string& key, const std::string& value) { entries_.emplace_back(key, value); }
    void add(const std::string& key, bool value) { entries_.emplace_back(key, value ? "true" : "false"); }
    void add(const std::string& key, std::size_t value) { entries_.emplace_back(key, std::to_string(value)); }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

    void write(const std::filesystem::path& path) const {
        std::ofstream os(path);
        if (!os) throw Error("cannot open " + path.string() + " for writing");
        for (const auto& [k, v] : entries_) os << k << '=' << v << '\n';
    }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

inline Grid make_grid(const RunConfig& cfg) {
    return cfg.dims == 1 ? Grid(cfg.nx, cfg.lx) : Grid(cfg.nx, cfg.ny, cfg.lx, cfg.ly);
}

/// Samples a profile. Noise is drawn from rng and re-centred to zero mean.
inline Field make_profile(const Profile& profile, const Grid& grid, std::mt19937_64& rng) {
    const double lx = grid.length(0);
    const double ly = grid.dims() == 2 ? grid.length(1) : 1.0;
    Field f = Field::sample(grid, [&](double x, double y) {
        const double cx = std::cos(profile.mode * std::numbers::pi * x / lx);
        const double cy = grid.dims() == 2 ? std::cos(profile.mode_y * std::numbers::pi * y / ly) : 1.0;
        return profile.mean + profile.amp * cx * cy;
    });
    if (profile.noise > 0.0) {
        std::uniform_real_distribution<double> uniform(-profile.noise, profile.noise);
        Field noise(grid);
        for (double& v : noise.values()) v = uniform(rng);
        const double m = mean(noise);
        for (std::size_t k = 0; k < f.size(); ++k) f[k] += noise[k] - m;
    }
    return f;
}

struct InitialData {
    Field theta0;
    Field phi0;
};

inline ModelParams make_params(const RunConfig& cfg, const Grid& grid) {
    ModelParams p(grid);
    p.ell = cfg.ell;
    p.nu = cfg.nu;
    p.gamma = cfg.gamma;
    p.a = cfg.a;
    p.b = cfg.b;
    p.eps_beta = cfg.eps_beta;
    p.eps_A = cfg.eps_A;
    p.graph = MonotoneGraph::from_name(cfg.graph);
    p.perturbation = SmoothPerturbation::linear(cfg.pi_coeff);
    p.A = HilbertOperator::from_name(cfg.op, cfg.rho, cfg.operator_graph, cfg.growth_constant);
    p.T = cfg.T;
    p.tau = cfg.tau;
    p.zeta_treatment = cfg.zeta_treatment == "lagged" ? ZetaTreatment::lagged : ZetaTreatment::resolvent;

    // Deterministic streams, one per profile, derived from the seed.
    std::mt19937_64 rng_eta(cfg.seed * 4 + 2), rng_source(cfg.seed * 4 + 3);
    p.eta_star = make_profile(cfg.eta_star, grid, rng_eta);
    const Field f = make_profile(cfg.source, grid, rng_source);
    if (f.max_abs() > 0.0) p.source = Source(f);
    p.validate();
    return p;
}

inline InitialData make_initial_data(const RunConfig& cfg, const Grid& grid) {
    std::mt19937_64 rng_theta(cfg.seed * 4), rng_phi(cfg.seed * 4 + 1);
    return {make_profile(cfg.theta0, grid, rng_theta), make_profile(cfg.phi0, grid, rng_phi)};
}

inline std::filesystem::path prepare_output_dir(const std::string& dir) {
    std::filesystem::path path(dir);
    std::filesystem::create_directories(path);
    return path;
}

inline std::string snapshot_name(const std::string& field, std::size_t step) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%08zu.chsf", field.c_str(), step);
    return buf;
}

// ---------------------------------------------------------------- simulate

struct SimulationResult {
    SimState final_state;
    std::size_t steps = 0;
    std::vector<DiagnosticsRecord> records;
    double max_mass_drift = 0.0;
    double max_energy_increase = 0.0;
    Summary summary;
};

/// Runs the configured system, writing diagnostics.csv, CHSF snapshots of
/// theta and phi every snapshot_stride steps, and summary.txt into out_dir
/// (when given). Diagnostics are recorded every `stride` steps; energy
/// monotonicity is monitored on every step.
inline SimulationResult run_simulation(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir) {
    const Grid grid = make_grid(cfg);
    const ModelParams p = make_params(cfg, grid);
    const InitialData init = make_initial_data(cfg, grid);
    const SimState s0 = prepare_initial_state(init.theta0, init.phi0, p, cfg.smooth_eps);

    SimulationResult result{s0, 0, {}, 0.0, 0.0, {}};
    std::ofstream csv;
    if (out_dir) {
        csv.open(*out_dir / "diagnostics.csv");
        if (!csv) throw Error("cannot write diagnostics.csv");
        csv << DiagnosticsRecord::csv_header() << '\n';
    }

    double last_energy = energy(s0, p);
    const double initial_energy = last_energy;
    double sup_theta = 0.0, sup_phi_v = 0.0, sup_zeta = 0.0;

    auto monitor = [&](const SimState& prev, const SimState& cur, std::size_t n) {
        result.max_mass_drift = std::max(result.max_mass_drift, std::abs(mean(cur.phi) - cur.m0));
        sup_theta = std::max(sup_theta, norm_h(cur.theta));
        sup_phi_v = std::max(sup_phi_v, norm_v(cur.phi));
        sup_zeta = std::max(sup_zeta, norm_h(cur.zeta));
        if (n > 0) {
            const double e = energy(cur, p);
            result.max_energy_increase = std::max(result.max_energy_increase, e - last_energy);
            last_energy = e;
        }
        const std::size_t stride = std::max<std::size_t>(cfg.stride, 1);
        const std::size_t total = step_count(0.0, p);
        if (n % stride == 0 || n == total) {
            const DiagnosticsRecord rec = record(cur, prev, p);
            result.records.push_back(rec);
            if (csv.is_open()) rec.write_csv(csv);
        }
        if (out_dir && cfg.snapshot_stride > 0 && (n % cfg.snapshot_stride == 0 || n == total)) {
            write_snapshot_file((*out_dir / snapshot_name("phi", n)).string(), cur.phi, cur.t);
            write_snapshot_file((*out_dir / snapshot_name("theta", n)).string(), cur.theta, cur.t);
        }
    };

    RunResult run_result = run(s0, p, {monitor}, 1);
    result.final_state = std::move(run_result.final_state);
    result.steps = run_result.steps;

    Summary& s = result.summary;
    s.add("experiment", std::string("simulate"));
    s.add("steps", run_result.steps);
    s.add("final_t", result.final_state.t);
    s.add("m0", s0.m0);
    s.add("max_mass_drift", result.max_mass_drift);
    s.add("energy_initial", initial_energy);
    s.add("energy_final", last_energy);
    s.add("max_energy_increase", result.max_energy_increase);
    s.add("sup_theta_h", sup_theta);
    s.add("sup_phi_v", sup_phi_v);
    s.add("sup_zeta_h", sup_zeta);
    // Data-regularity monitor ||mu(0)||_V, reported but not enforced.
    s.add("initial_mu_v", norm_v(s0.mu));
    if (out_dir) s.write(*out_dir / "summary.txt");
    return result;
}

// --------------------------------------------------------------- smc

inline void write_reaching_csv(const std::filesystem::path& path, const ReachingReport& rep) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open " + path.string());
    os << "t,psi,sigma_norm\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const PsiSample& s : rep.psi_series) os << s.t << ',' << s.psi << ',' << s.sigma_norm << '\n';
}

inline void add_report(Summary& s, const std::string& prefix, const ReachingReport& rep) {
    s.add(prefix + "rho", rep.rho);
    s.add(prefix + "psi0", rep.psi0);
    s.add(prefix + "tol_abs", rep.tol_abs);
    s.add(prefix + "c_hat", rep.c_hat);
    s.add(prefix + "a0", rep.a0);
    s.add(prefix + "b0", rep.b0);
    s.add(prefix + "rho_star", rep.rho_star);
    s.add(prefix + "reached", rep.t_star.has_value());
    s.add(prefix + "t_star", rep.t_star ? *rep.t_star : std::numeric_limits<double>::quiet_NaN());
    s.add(prefix + "bound", rep.bound ? *rep.bound : std::numeric_limits<double>::quiet_NaN());
    s.add(prefix + "monotone_before", rep.monotone_before);
    s.add(prefix + "stays_after", rep.stays_after);
    s.add(prefix + "inequality_holds", rep.inequality_holds);
    s.add(prefix + "max_inequality_excess", rep.max_inequality_excess);
}

struct SmcSweepResult {
    double pilot_c_hat = 0.0;
    double rho_star = 0.0;
    std::vector<ReachingReport> runs;
    bool all_reached = true;
    bool t_star_nonincreasing = true;
    bool all_within_bound = true; ///< T* <= bound * (1 + bound_slack)
    bool all_monotone_before = true;
    bool all_stay_after = true;
};

/// Estimates c_hat on a pilot run at rho_pilot, sets rho* from it, and runs
/// the controlled system for rho = factor * rho* for every factor.
inline SmcSweepResult smc_sweep(const ModelParams& base, const Field& theta0, const Field& phi0, double rho_pilot,
                                const std::vector<double>& factors, double tol_rel, double bound_slack = 0.2) {
    SmcSweepResult res;
    const ReachingReport pilot = run_smc_experiment(SmcConfig::make(base, rho_pilot, tol_rel), theta0, phi0);
    res.pilot_c_hat = pilot.c_hat;
    res.rho_star = rho_star(pilot.c_hat, base.T, theta0, phi0, base.eta_star, base.b);

    std::optional<double> previous;
    for (double factor : factors) {
        ReachingReport rep = run_smc_experiment(SmcConfig::make(base, factor * res.rho_star, tol_rel), theta0, phi0);
        if (!rep.t_star) {
            res.all_reached = false;
            res.t_star_nonincreasing = false;
            res.all_within_bound = false;
        } else {
            if (previous && *rep.t_star > *previous) res.t_star_nonincreasing = false;
            previous = rep.t_star;
            if (!rep.bound || *rep.t_star > *rep.bound * (1.0 + bound_slack)) res.all_within_bound = false;
        }
        res.all_monotone_before = res.all_monotone_before && rep.monotone_before;
        res.all_stay_after = res.all_stay_after && rep.stays_after;
        res.runs.push_back(std::move(rep));
    }
    return res;
}

// ----------------------------------------------------------- contdep

struct ContDepSweepResult {
    ContDepReport identical;
    std::vector<std::pair<double, ContDepReport>> perturbed;
    double spread = 0.0; ///< max ratio / min ratio over the perturbations
};

/// Compares the configured data with copies whose theta0 is perturbed by
/// delta cos(mode pi x / Lx), for every delta.
inline ContDepSweepResult contdep_sweep(const ModelParams& p, const InitialData& init, const std::vector<double>& deltas,
                                        int mode) {
    const Grid& grid = p.grid();
    const Field direction = Field::sample(grid, [&](double x) { return std::cos(mode * std::numbers::pi * x / grid.length(0)); });
    const TrajectoryData base{init.theta0, init.phi0, p.source, p.eta_star};

    ContDepSweepResult res;
    res.identical = cont_dep_experiment(base, base, p);
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (double delta : deltas) {
        TrajectoryData other = base;
        other.theta0 += direction * delta;
        const ContDepReport rep = cont_dep_experiment(base, other, p);
        lo = std::min(lo, rep.ratio);
        hi = std::max(hi, rep.ratio);
        res.perturbed.emplace_back(delta, rep);
    }
    res.spread = hi / lo;
    return res;
}

// --------------------------------------------------------- eps-study

struct EpsStudyResult {
    std::vector<double> eps;
    std::vector<double> distances; ///< ||phi_{eps_k} - phi_{eps_{k+1}}||_{L2(Q)}
    bool strictly_decreasing = true;
};

/// Runs the same data with eps_beta = eps_A = eps for each level and measures
/// L2(Q) distances between consecutive phi trajectories (rectangle rule in time).
inline EpsStudyResult eps_study(const ModelParams& base, const InitialData& init, const std::vector<double>& levels) {
    std::vector<std::vector<Field>> trajectories;
    for (double eps : levels) {
        ModelParams p = base;
        p.eps_beta = p.eps_A = eps;
        std::vector<Field> phis;
        SimState s = prepare_initial_state(init.theta0, init.phi0, p, 0.0);
        const std::size_t steps = step_count(0.0, p);
        for (std::size_t n = 0; n < steps; ++n) {
            s = step(s, p);
            phis.push_back(s.phi);
        }
        trajectories.push_back(std::move(phis));
    }
    EpsStudyResult res;
    res.eps = levels;
    for (std::size_t k = 0; k + 1 < trajectories.size(); ++k) {
        double sum = 0.0;
        for (std::size_t n = 0; n < trajectories[k].size(); ++n) {
            const double d = norm_h(trajectories[k][n] - trajectories[k + 1][n]);
            sum += base.tau * d * d;
        }
        res.distances.push_back(std::sqrt(sum));
        if (k > 0 && !(res.distances[k] < res.distances[k - 1])) res.strictly_decreasing = false;
    }
    return res;
}

} // namespace chsmc
