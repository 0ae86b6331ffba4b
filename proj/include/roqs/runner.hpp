// runner.hpp — sweep orchestration, persistence, and figure-data emission
//
// A sweep walks (ensemble, realization) pairs: sample an interaction matrix,
// build and diagonalize the generator, persist per-mode spectral data, and in
// dynamics mode additionally propagate Haar initial states under H0 and H0+V
// and record coherence-time and sensitivity metrics.  Every random object is
// addressed by (master_seed, ensemble, realization, role), so results are
// independent of worker count and reproducible from the config alone.
//
// Output layout under config.output_dir:
//   manifest.json
//   <ensemble>/<realization>/eigs.csv
//   <ensemble>/<realization>/traj_<state>.csv       (dynamics mode, H0)
//   <ensemble>/<realization>/traj_<state>_pert.csv  (dynamics mode, H0+V)
//   <ensemble>/<realization>/summary.json
//   figures/<figure_id>/...                          (emit_figure_data)
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "roqs/types.hpp"

namespace roqs::runner {

// one ensemble in a sweep: a scaled-t interaction ensemble with tail
// parameter nu, or the Ginibre (GinUE) reference
struct EnsembleId {
    bool ginue = false;
    double nu = 0.0;

    std::string label() const;          // "nu1", "nu2.5", "ginue"; directory name
    std::uint64_t stream_code() const;  // stable seed-derivation code
};

struct SweepConfig {
    int system_dim = 50;
    std::vector<double> nu_list = {1, 2, 3, 4, 5};
    bool include_ginue = true;
    int realizations = 64;
    int initial_states = 20;
    std::string hamiltonian_mode = "zero";  // "zero" or "gue"
    bool dynamics = false;  // propagate initial states under H0 and H0+V
    int grid_points = 200;
    bool dump_superoperators = false;
    double alpha = 1.0;
    double hbar = 1.0;
    std::uint64_t master_seed = 20260823;
    std::string output_dir = "run-output";
    int worker_count = 0;  // 0 picks hardware concurrency

    std::vector<EnsembleId> ensembles() const;  // nu_list order, then ginue
};

// substream addressing shared by sweeps and the CLI inspection commands;
// changing one ensemble's nu never shifts a stream of another triple
enum class StreamRole : std::uint64_t {
    kossakowski = 1,
    hamiltonian = 2,
    perturbation = 3,
    figure = 4,
};
std::uint64_t realization_stream(const EnsembleId& ens, int realization, StreamRole role);
std::uint64_t initial_state_stream(const EnsembleId& ens, int realization, int state);

void validate_config(const SweepConfig& config);
SweepConfig load_config(const std::string& path);
void save_config(const SweepConfig& config, const std::string& path);

// named scales: "desk" fits in minutes, "paper" reproduces the full-size runs
SweepConfig desk_config();
SweepConfig paper_config();

struct RealizationRecord {
    std::string ensemble;
    int realization = 0;
    std::string status;   // "ok" | "flagged" | "failed"
    std::string message;  // failure detail or flag summary
    std::uint64_t seed_kossakowski = 0;
    std::uint64_t seed_hamiltonian = 0;
    std::uint64_t seed_perturbation = 0;
    double gap = 0.0;
    double mean_petermann = 0.0;       // unflagged modes only
    double steady_state_distance = 0.0;
    double trace_h2 = 0.0;             // measured Tr[H0^2]; 0 in zero mode
    int flagged_modes = 0;
    std::map<std::string, std::string> files;  // relative path -> FNV-1a hex
};

struct RunManifest {
    SweepConfig config;
    std::string version;
    double wall_clock_seconds = 0.0;
    double mean_trace_h2 = 0.0;  // ensemble mean of Tr[H0^2] (gue mode)
    std::vector<RealizationRecord> records;
    std::string run_dir;
};

// executes the sweep; individual realization failures are recorded and
// skipped, never fatal.  Writes manifest.json before returning.
RunManifest run_sweep(const SweepConfig& config);

// reads manifest.json back and checks that every referenced file exists
RunManifest load_manifest(const std::string& run_dir);

// plot-ready CSV for fig1-fig4 and s1-s7; throws computation_error naming the
// missing sweep mode when the manifest lacks the required data
std::vector<std::string> emit_figure_data(const RunManifest& manifest,
                                          const std::string& figure_id);

// flat readers for downstream analysis (figure emitters, acceptance checks)
struct EigenvalueRow {
    int realization = 0;
    int mode = 0;
    double re = 0.0, im = 0.0;
    double petermann = 0.0, q = 0.0, spacing = 0.0;
    bool flagged = false;
};
std::vector<EigenvalueRow> load_eigenvalues(const std::string& run_dir,
                                            const std::string& ensemble);

struct StateMetricsRow {
    int realization = 0;
    int state = 0;
    double t2 = 0.0, delta_t2 = 0.0, delta_t2_relative = 0.0, delta_ce = 0.0;
    bool converged = false, unreliable = false;
    std::string error;  // nonempty when this state failed
};
std::vector<StateMetricsRow> load_state_metrics(const std::string& run_dir,
                                                const std::string& ensemble);

// quantile with linear interpolation, p in [0, 1]; NaNs are rejected upstream
double quantile(std::vector<double> values, double p);

}  // namespace roqs::runner
