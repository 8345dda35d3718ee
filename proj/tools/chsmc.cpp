// chsmc: command-line driver for the Cahn-Hilliard / sliding-mode simulator.
//
//   chsmc run       --config FILE [--out DIR]
//   chsmc smc       --config FILE [--rho R] [--rho-sweep [F...]] [--tol T] [--out DIR]
//   chsmc contdep   --config FILE [--out DIR]
//   chsmc eps-study --config FILE [--out DIR]
//   chsmc selftest  [--seed N]
//
// Exit codes: 0 success, 1 configuration or validation error, 2 runtime error.

#include "chsmc/chsmc.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace chsmc;

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int do_run(const RunConfig& cfg) {
    const auto out = prepare_output_dir(cfg.out);
    const SimulationResult res = run_simulation(cfg, out);
    std::cout << "steps=" << res.steps << " max_mass_drift=" << res.max_mass_drift
              << " max_energy_increase=" << res.max_energy_increase << "\nwrote " << out.string() << "\n";
    return 0;
}

int do_smc(RunConfig cfg, std::optional<double> rho, bool sweep, const std::vector<double>& factors,
           std::optional<double> tol) {
    if (tol) cfg.tol_rel = *tol;
    if (rho) cfg.rho = *rho;
    if (!factors.empty()) cfg.rho_factors = factors;
    // --rho-sweep forces a sweep and --rho a single run; otherwise the config decides.
    if (sweep)
        cfg.experiment = "smc-sweep";
    else if (rho || cfg.experiment != "smc-sweep")
        cfg.experiment = "smc";
    cfg.op = "sign";
    cfg.validate();

    const Grid grid = make_grid(cfg);
    const ModelParams base = make_params(cfg, grid);
    const InitialData init = make_initial_data(cfg, grid);
    const auto out = prepare_output_dir(cfg.out);
    Summary summary;

    if (cfg.experiment == "smc") {
        const ReachingReport rep = run_smc_experiment(SmcConfig::make(base, cfg.rho, cfg.tol_rel), init.theta0, init.phi0);
        write_reaching_csv(out / "reaching.csv", rep);
        summary.add("experiment", std::string("smc"));
        add_report(summary, "", rep);
        summary.write(out / "summary.txt");
        std::cout << "rho=" << rep.rho << " psi0=" << rep.psi0 << " t_star="
                  << (rep.t_star ? std::to_string(*rep.t_star) : std::string("none")) << "\nwrote " << out.string() << "\n";
        return 0;
    }

    const SmcSweepResult res = smc_sweep(base, init.theta0, init.phi0, cfg.rho_pilot, cfg.rho_factors, cfg.tol_rel);
    summary.add("experiment", std::string("smc-sweep"));
    summary.add("rho_pilot", cfg.rho_pilot);
    summary.add("pilot_c_hat", res.pilot_c_hat);
    summary.add("rho_star", res.rho_star);
    summary.add("all_reached", res.all_reached);
    summary.add("t_star_nonincreasing", res.t_star_nonincreasing);
    summary.add("all_within_bound", res.all_within_bound);
    summary.add("all_monotone_before", res.all_monotone_before);
    summary.add("all_stay_after", res.all_stay_after);
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
        const std::string name = "rho_" + std::to_string(i);
        const auto dir = prepare_output_dir((out / name).string());
        write_reaching_csv(dir / "reaching.csv", res.runs[i]);
        add_report(summary, name + ".", res.runs[i]);
        std::cout << name << ": rho=" << res.runs[i].rho << " t_star="
                  << (res.runs[i].t_star ? std::to_string(*res.runs[i].t_star) : std::string("none")) << "\n";
    }
    summary.write(out / "summary.txt");
    std::cout << "rho_star=" << res.rho_star << "\nwrote " << out.string() << "\n";
    return 0;
}

int do_contdep(RunConfig cfg) {
    cfg.experiment = "contdep";
    cfg.validate();
    const Grid grid = make_grid(cfg);
    const ModelParams p = make_params(cfg, grid);
    const InitialData init = make_initial_data(cfg, grid);
    const ContDepSweepResult res = contdep_sweep(p, init, cfg.contdep_deltas, cfg.contdep_mode);

    const auto out = prepare_output_dir(cfg.out);
    std::FILE* csv = std::fopen((out / "contdep.csv").string().c_str(), "w");
    if (csv == nullptr) throw Error("cannot write contdep.csv");
    std::fprintf(csv, "delta,lhs,rhs,ratio\n");
    std::fprintf(csv, "0,%.17g,%.17g,%.17g\n", res.identical.lhs, res.identical.rhs, res.identical.ratio);
    for (const auto& [delta, rep] : res.perturbed)
        std::fprintf(csv, "%.17g,%.17g,%.17g,%.17g\n", delta, rep.lhs, rep.rhs, rep.ratio);
    std::fclose(csv);

    Summary summary;
    summary.add("experiment", std::string("contdep"));
    summary.add("identical_ratio", res.identical.ratio);
    for (std::size_t i = 0; i < res.perturbed.size(); ++i)
        summary.add("ratio_" + std::to_string(i), res.perturbed[i].second.ratio);
    summary.add("ratio_spread", res.spread);
    summary.write(out / "summary.txt");
    std::cout << "ratio_spread=" << res.spread << "\nwrote " << out.string() << "\n";
    return 0;
}

int do_eps_study(RunConfig cfg) {
    cfg.experiment = "eps-study";
    cfg.validate();
    const Grid grid = make_grid(cfg);
    const ModelParams p = make_params(cfg, grid);
    const InitialData init = make_initial_data(cfg, grid);
    const EpsStudyResult res = eps_study(p, init, cfg.eps_list);

    const auto out = prepare_output_dir(cfg.out);
    std::FILE* csv = std::fopen((out / "eps_study.csv").string().c_str(), "w");
    if (csv == nullptr) throw Error("cannot write eps_study.csv");
    std::fprintf(csv, "eps_k,eps_k1,distance\n");
    for (std::size_t k = 0; k < res.distances.size(); ++k)
        std::fprintf(csv, "%.17g,%.17g,%.17g\n", res.eps[k], res.eps[k + 1], res.distances[k]);
    std::fclose(csv);

    Summary summary;
    summary.add("experiment", std::string("eps-study"));
    for (std::size_t k = 0; k < res.distances.size(); ++k) summary.add("distance_" + std::to_string(k), res.distances[k]);
    summary.add("strictly_decreasing", res.strictly_decreasing);
    summary.write(out / "summary.txt");
    std::cout << "strictly_decreasing=" << (res.strictly_decreasing ? "true" : "false") << "\nwrote " << out.string() << "\n";
    return 0;
}

int do_selftest(std::uint64_t seed) {
    const auto results = run_selftest(seed);
    bool ok = true;
    for (const CheckResult& r : results) {
        std::printf("%-52s %s  measured=%.3e  threshold=%.1e\n", r.name.c_str(), r.pass ? "PASS" : "FAIL", r.measured,
                    r.threshold);
        ok = ok && r.pass;
    }
    std::printf("%s\n", ok ? "all checks passed" : "some checks FAILED");
    return ok ? 0 : kExitRuntime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cahn-Hilliard system with a maximal monotone perturbation and sliding-mode control"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<double> rho, tol;
    std::vector<std::string> sweep_factors;
    std::uint64_t seed = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file (key = value)")->required();
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
    };
    CLI::App* run_cmd = app.add_subcommand("run", "simulate and write diagnostics.csv, snapshots, summary.txt");
    add_common(run_cmd);
    CLI::App* smc_cmd = app.add_subcommand("smc", "sliding-mode reaching experiment");
    add_common(smc_cmd);
    smc_cmd->add_option("--rho", rho, "control gain for a single run");
    CLI::Option* sweep_opt = smc_cmd->add_option("--rho-sweep", sweep_factors, "sweep rho = factor * rho* (default factors from config)")
                                 ->expected(0, CLI::detail::expected_max_vector_size);
    smc_cmd->add_option("--tol", tol, "reaching tolerance relative to max(psi0, 1)");
    CLI::App* contdep_cmd = app.add_subcommand("contdep", "continuous-dependence experiment");
    add_common(contdep_cmd);
    CLI::App* eps_cmd = app.add_subcommand("eps-study", "epsilon-refinement study");
    add_common(eps_cmd);
    CLI::App* selftest_cmd = app.add_subcommand("selftest", "run the property suites");
    selftest_cmd->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (selftest_cmd->parsed()) return do_selftest(seed);

        RunConfig cfg = load_config(config_path);
        if (out_dir) cfg.out = *out_dir;
        if (run_cmd->parsed()) return do_run(cfg);
        if (smc_cmd->parsed()) {
            // A bare --rho-sweep yields one empty result, which CLI11 would turn into 0.
            std::vector<double> factors;
            for (const std::string& r : sweep_opt->results())
                if (!r.empty()) factors.push_back(std::stod(r));
            return do_smc(cfg, rho, sweep_opt->count() > 0, factors, tol);
        }
        if (contdep_cmd->parsed()) return do_contdep(cfg);
        if (eps_cmd->parsed()) return do_eps_study(cfg);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return kExitValidation;
    } catch (const MeanOutsideDomain& e) {
        std::cerr << "invalid initial data: " << e.what() << "\n";
        return kExitValidation;
    } catch (const PotentialInfinite& e) {
        std::cerr << "invalid initial data: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitValidation;
}
