// main.cpp — command-line front end
//
// Subcommands:
//   sample    draw interaction-entry samples, report variance and tail index
//   spectrum  one realization: build the generator, decompose, print a report
//   sweep     full (ensemble x realization) sweep with persistence
//   figures   plot-ready CSV emission from a finished sweep
//   verify    fast built-in oracle checks (smoke test; the full suite is ctest)
//
// Exit codes: 0 success, 1 failure (JSON error summary on stdout), 2 usage.
#include "roqs/dynamics.hpp"
#include "roqs/ensembles.hpp"
#include "roqs/liouvillian.hpp"
#include "roqs/runner.hpp"
#include "roqs/spectral.hpp"
#include "roqs/version.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>

using nlohmann::json;
using namespace roqs;

namespace {

runner::EnsembleId make_ensemble(bool ginue, double nu) {
    if (ginue) return {true, 0.0};
    if (!(nu > 0.0)) throw invalid_input("nu must be positive");
    return {false, nu};
}

int cmd_sample(bool ginue, double nu, std::size_t count, std::uint64_t seed, int hill_k) {
    using namespace ensembles;
    runner::EnsembleId ens = make_ensemble(ginue, nu);
    StreamRng rng({seed, runner::realization_stream(ens, 0, runner::StreamRole::figure)});
    std::vector<double> samples(count);
    double m2 = 0.0;
    for (double& v : samples) {
        v = ginue ? rng.normal() * std::sqrt(0.5)
                  : rng.normal() / std::sqrt(2.0 * rng.chi_squared(nu) / nu);
        m2 += v * v;
    }
    std::vector<double> mags(count);
    for (std::size_t i = 0; i < count; ++i) mags[i] = std::abs(samples[i]);
    int k = hill_k > 0 ? hill_k : default_hill_k(count);

    json report{{"ensemble", ens.label()},
                {"count", count},
                {"sample_variance", m2 / static_cast<double>(count)},
                {"hill_tail_index", estimate_tail_index(mags, k)},
                {"hill_k", k}};
    if (ginue) {
        report["theory_variance"] = 0.5;
    } else {
        report["regime"] = regime_label(classify_tail(nu));
        if (nu > 2.0) report["theory_variance"] = nu / (2.0 * (nu - 2.0));
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_spectrum(bool ginue, double nu, int dim, const std::string& hamiltonian_mode,
                 std::uint64_t seed, int realization, const std::string& dump_path) {
    using namespace ensembles;
    if (hamiltonian_mode != "zero" && hamiltonian_mode != "gue")
        throw invalid_input("--hamiltonian must be 'zero' or 'gue'");
    runner::EnsembleId ens = make_ensemble(ginue, nu);
    const int m = dim * dim - 1;

    StreamRng rng_k(
        {seed, runner::realization_stream(ens, realization, runner::StreamRole::kossakowski)});
    Matrix x =
        ginue ? sample_ginibre(m, rng_k) : sample_student_t_matrix(m, nu, rng_k);
    Matrix k = build_kossakowski(x, dim);
    Matrix h = Matrix::Zero(dim, dim);
    if (hamiltonian_mode == "gue") {
        StreamRng rng_h({seed, runner::realization_stream(ens, realization,
                                                          runner::StreamRole::hamiltonian)});
        h = sample_gue_hamiltonian(dim, rng_h);
    }
    auto sup = liouville::build_superoperator(liouville::make_model(h, k));
    if (!dump_path.empty()) liouville::dump_superoperator(sup, dump_path);

    auto dec = spectral::decompose(sup);
    RealVector km = spectral::petermann_factors(dec);
    RealVector qf = spectral::q_factors(dec);
    int flagged = 0;
    double km_mean = 0.0, q_max = 0.0;
    int kept = 0;
    for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
        if (dec.flagged[static_cast<std::size_t>(i)]) {
            ++flagged;
            continue;
        }
        km_mean += km(i);
        ++kept;
        if (std::isfinite(qf(i))) q_max = std::max(q_max, qf(i));
    }
    km_mean = kept > 0 ? km_mean / kept : 0.0;

    json modes = json::array();
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(10, dec.eigenvalues.size()); ++i)
        modes.push_back({{"re", dec.eigenvalues(i).real()},
                         {"im", dec.eigenvalues(i).imag()},
                         {"petermann", km(i)}});
    json report{{"ensemble", ens.label()},
                {"system_dim", dim},
                {"hamiltonian_mode", hamiltonian_mode},
                {"realization", realization},
                {"spectral_gap", spectral::spectral_gap(dec)},
                {"mean_petermann", km_mean},
                {"max_q_factor", q_max},
                {"flagged_modes", flagged},
                {"steady_state_distance", spectral::steady_state_distance(dec)},
                {"slowest_modes", modes}};
    if (!dump_path.empty()) report["superoperator_dump"] = dump_path;
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const runner::SweepConfig& config) {
    runner::RunManifest manifest = runner::run_sweep(config);
    int ok = 0, flagged = 0, failed = 0;
    for (const auto& rec : manifest.records) {
        if (rec.status == "ok") ++ok;
        else if (rec.status == "flagged") ++flagged;
        else ++failed;
    }
    json report{{"run_dir", manifest.run_dir},
                {"realizations", manifest.records.size()},
                {"ok", ok},
                {"flagged", flagged},
                {"failed", failed},
                {"wall_clock_seconds", manifest.wall_clock_seconds}};
    if (config.hamiltonian_mode == "gue")
        report["mean_trace_h2"] = manifest.mean_trace_h2;
    std::cout << report.dump(2) << "\n";
    return failed == static_cast<int>(manifest.records.size()) ? 1 : 0;
}

int cmd_figures(const std::string& figure_id, const std::string& run_dir) {
    runner::RunManifest manifest = runner::load_manifest(run_dir);
    std::vector<std::string> files = runner::emit_figure_data(manifest, figure_id);
    json report{{"figure", figure_id}, {"files", files}};
    std::cout << report.dump(2) << "\n";
    return 0;
}

// fast smoke checks; each prints one line, any failure flips the exit code
int cmd_verify() {
    using namespace ensembles;
    int failures = 0;
    auto check = [&](const char* name, bool pass, const std::string& detail) {
        std::printf("[%s] %s%s%s\n", pass ? "ok" : "FAIL", name,
                    detail.empty() ? "" : ": ", detail.c_str());
        if (!pass) ++failures;
    };

    {  // assembled generator vs direct right-hand side
        double worst = 0.0;
        for (int trial = 0; trial < 5; ++trial) {
            const int n = 3, m = n * n - 1;
            StreamRng rng({99, static_cast<std::uint64_t>(trial)});
            auto model = liouville::make_model(sample_gue_hamiltonian(n, rng),
                                               build_kossakowski(sample_ginibre(m, rng), n));
            auto sup = liouville::build_superoperator(model);
            Matrix rho = sample_haar_pure_state(n, rng);
            Vector lhs = sup.matrix * basis::vectorize(rho);
            Vector rhs = basis::vectorize(liouville::apply_rhs_direct(model, rho));
            worst = std::max(worst, (lhs - rhs).norm() / rhs.norm());
        }
        check("superoperator matches direct RHS", worst < 1e-10,
              "max relative deviation " + std::to_string(worst));
    }
    {  // analytic dephasing: spectrum, decay, closed-form coherence
        Matrix k = Matrix::Zero(3, 3);
        k(2, 2) = 2.0;
        auto sup = liouville::build_superoperator(
            liouville::make_model_unchecked(Matrix::Zero(2, 2), k));
        auto dec = spectral::decompose(sup);
        Vector expect(4);
        expect << 0, 0, -2, -2;
        double spec_err = (dec.eigenvalues - expect).cwiseAbs().maxCoeff();
        Matrix rho0(2, 2);
        rho0 << 0.5, 0.5, 0.5, 0.5;
        auto grid = dynamics::uniform_grid(2.0, 41);
        auto states = dynamics::evolve(dec, rho0, grid);
        double traj_err = 0.0;
        for (std::size_t i = 0; i < states.size(); ++i) {
            double t = grid.points[i];
            traj_err = std::max(traj_err, std::abs(std::abs(states[i](0, 1)) -
                                                   0.5 * std::exp(-2.0 * t)));
            double p = 0.5 * (1.0 + std::exp(-2.0 * t));
            double closed = std::log(2.0) + p * std::log(p) + (1 - p) * std::log1p(-p);
            traj_err = std::max(traj_err, std::abs(dynamics::relative_entropy_coherence(
                                                       states[i]) -
                                                   closed));
        }
        check("dephasing oracle", spec_err < 1e-10 && traj_err < 1e-8,
              "spectrum " + std::to_string(spec_err) + ", trajectory " +
                  std::to_string(traj_err));
    }
    {  // zero mode, trace preservation, biorthonormality along one realization
        const int n = 4, m = n * n - 1;
        StreamRng rng({7, 3});
        auto sup = liouville::build_superoperator(liouville::make_model(
            sample_gue_hamiltonian(n, rng), build_kossakowski(sample_ginibre(m, rng), n)));
        auto dec = spectral::decompose(sup);
        double zero = std::abs(dec.eigenvalues(0)) / dec.operator_norm;
        Matrix overlap = dec.left.adjoint() * dec.right;
        double biorth = (overlap - Matrix::Identity(overlap.rows(), overlap.cols()))
                            .cwiseAbs()
                            .maxCoeff();
        auto rec = dynamics::propagate_coherence(dec, sample_haar_pure_state(n, rng),
                                                 dynamics::uniform_grid(5.0, 50));
        double km_min = spectral::petermann_factors(dec).minCoeff();
        check("zero mode / biorthonormality / trace",
              zero < 1e-8 && biorth < 1e-8 && rec.trace_error < 1e-8 && km_min >= 1.0 - 1e-8,
              "zero " + std::to_string(zero) + ", biorth " + std::to_string(biorth) +
                  ", trace " + std::to_string(rec.trace_error));
    }
    {  // exponential fit recovery and the constant-log-ratio metric
        auto grid = dynamics::uniform_grid(20.0, 100);
        std::vector<double> series, scaled;
        for (double t : grid.points) {
            series.push_back(2.0 * std::exp(-t / 5.0) + 0.1);
            scaled.push_back(series.back() * std::exp(0.1));
        }
        auto fit = dynamics::fit_coherence_time(grid, series);
        bool fit_ok = fit.converged && std::abs(fit.amplitude - 2.0) < 1e-6 &&
                      std::abs(fit.coherence_time - 5.0) < 1e-6 &&
                      std::abs(fit.offset - 0.1) < 1e-6;
        auto pm = dynamics::coherence_perturbation_metrics(series, scaled, grid, 5.0);
        check("fit recovery / delta_CE", fit_ok && std::abs(pm.delta_ce - 0.01) < 1e-12,
              "T2 " + std::to_string(fit.coherence_time) + ", delta_CE " +
                  std::to_string(pm.delta_ce));
    }
    {  // sampler moments and tail index
        StreamRng rng({5, 1});
        const int draws = 100000;
        double m2 = 0.0;
        std::vector<double> mags(draws);
        for (int i = 0; i < draws; ++i) {
            double v = rng.normal() / std::sqrt(2.0 * rng.chi_squared(6.0) / 6.0);
            m2 += v * v;
        }
        m2 /= draws;
        StreamRng rng1({5, 2});
        for (int i = 0; i < draws; ++i)
            mags[static_cast<std::size_t>(i)] =
                std::abs(rng1.normal() / std::sqrt(2.0 * rng1.chi_squared(1.0)));
        double hill = estimate_tail_index(mags, default_hill_k(mags.size()));
        check("sampler variance / Hill index",
              std::abs(m2 - 0.75) < 0.075 && std::abs(hill - 1.0) < 0.3,
              "var " + std::to_string(m2) + " (theory 0.75), hill " + std::to_string(hill));
    }
    std::printf("%s\n", failures == 0 ? "verify: all checks passed"
                                      : "verify: FAILURES detected");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random Lindbladian ensembles with heavy-tailed interactions"};
    app.set_version_flag("--version", std::string(version_string));
    app.require_subcommand(1);

    // sample ------------------------------------------------------------
    auto* sample = app.add_subcommand("sample", "inspect entry distributions and tail index");
    double sample_nu = 1.0;
    bool sample_ginue = false;
    std::size_t sample_count = 100000;
    std::uint64_t sample_seed = 1;
    int sample_hill_k = 0;
    sample->add_option("--nu", sample_nu, "tail parameter of the scaled t distribution");
    sample->add_flag("--ginue", sample_ginue, "sample the GinUE reference instead");
    sample->add_option("--count", sample_count, "number of draws");
    sample->add_option("--seed", sample_seed, "master seed");
    sample->add_option("--hill-k", sample_hill_k, "Hill order statistics (0 = sqrt(n))");

    // spectrum ----------------------------------------------------------
    auto* spectrum = app.add_subcommand("spectrum", "single-realization decomposition report");
    double spec_nu = 1.0;
    bool spec_ginue = false;
    int spec_dim = 20;
    std::string spec_h = "zero";
    std::uint64_t spec_seed = 1;
    int spec_realization = 0;
    std::string spec_dump;
    spectrum->add_option("--nu", spec_nu, "tail parameter");
    spectrum->add_flag("--ginue", spec_ginue, "use the GinUE reference ensemble");
    spectrum->add_option("--dim", spec_dim, "Hilbert-space dimension N")
        ->check(CLI::Range(2, 64));
    spectrum->add_option("--hamiltonian", spec_h, "zero or gue");
    spectrum->add_option("--seed", spec_seed, "master seed");
    spectrum->add_option("--realization", spec_realization, "realization index");
    spectrum->add_option("--dump", spec_dump, "write the binary superoperator here");

    // sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "run a full ensemble sweep");
    std::string sweep_config_path, sweep_scale = "desk";
    int sw_dim = 0, sw_realizations = 0, sw_states = 0, sw_grid = 0, sw_workers = -1;
    std::vector<double> sw_nu;
    bool sw_no_ginue = false, sw_dynamics = false, sw_dump = false;
    std::string sw_h, sw_output;
    std::uint64_t sw_seed = 0;
    sweep->add_option("--config", sweep_config_path, "JSON config file (overrides --scale)");
    sweep->add_option("--scale", sweep_scale, "desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    auto* o_dim = sweep->add_option("--dim", sw_dim, "Hilbert-space dimension N");
    auto* o_real = sweep->add_option("--realizations", sw_realizations, "per ensemble");
    auto* o_states = sweep->add_option("--states", sw_states, "initial states per realization");
    auto* o_nu = sweep->add_option("--nu", sw_nu, "nu list (repeatable)");
    auto* o_nog = sweep->add_flag("--no-ginue", sw_no_ginue, "drop the GinUE reference");
    auto* o_h = sweep->add_option("--hamiltonian", sw_h, "zero or gue");
    auto* o_dyn = sweep->add_flag("--dynamics", sw_dynamics, "propagate initial states");
    auto* o_grid = sweep->add_option("--grid-points", sw_grid, "trajectory grid points");
    auto* o_seed = sweep->add_option("--seed", sw_seed, "master seed");
    auto* o_out = sweep->add_option("--output", sw_output, "output directory");
    auto* o_workers = sweep->add_option("--workers", sw_workers, "worker threads (0 = auto)");
    auto* o_dump = sweep->add_flag("--dump-superoperators", sw_dump, "persist L binaries");

    // figures -----------------------------------------------------------
    auto* figures = app.add_subcommand("figures", "emit plot-ready data from a sweep");
    std::string fig_id, fig_run;
    figures->add_option("figure", fig_id, "fig1..fig4 or s1..s7")->required();
    figures->add_option("--run", fig_run, "sweep output directory")->required();

    // verify ------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "run the built-in oracle smoke checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sample->parsed())
            return cmd_sample(sample_ginue, sample_nu, sample_count, sample_seed,
                              sample_hill_k);
        if (spectrum->parsed())
            return cmd_spectrum(spec_ginue, spec_nu, spec_dim, spec_h, spec_seed,
                                spec_realization, spec_dump);
        if (sweep->parsed()) {
            runner::SweepConfig cfg;
            if (!sweep_config_path.empty())
                cfg = runner::load_config(sweep_config_path);
            else
                cfg = sweep_scale == "paper" ? runner::paper_config()
                                             : runner::desk_config();
            if (o_dim->count()) cfg.system_dim = sw_dim;
            if (o_real->count()) cfg.realizations = sw_realizations;
            if (o_states->count()) cfg.initial_states = sw_states;
            if (o_nu->count()) cfg.nu_list = sw_nu;
            if (o_nog->count()) cfg.include_ginue = false;
            if (o_h->count()) cfg.hamiltonian_mode = sw_h;
            if (o_dyn->count()) cfg.dynamics = true;
            if (o_grid->count()) cfg.grid_points = sw_grid;
            if (o_seed->count()) cfg.master_seed = sw_seed;
            if (o_out->count()) cfg.output_dir = sw_output;
            if (o_workers->count()) cfg.worker_count = sw_workers;
            if (o_dump->count()) cfg.dump_superoperators = true;
            return cmd_sweep(cfg);
        }
        if (figures->parsed()) return cmd_figures(fig_id, fig_run);
        if (verify->parsed()) return cmd_verify();
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 2;  // unreachable with require_subcommand(1)
}
