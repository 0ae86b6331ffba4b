// runner.cpp — sweep execution, persistence, manifest, figure emitters
#include "roqs/runner.hpp"

#include "roqs/dynamics.hpp"
#include "roqs/ensembles.hpp"
#include "roqs/liouvillian.hpp"
#include "roqs/spectral.hpp"
#include "roqs/version.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace roqs::runner {

namespace {

constexpr std::uint64_t role_state_base = 100;

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

// write bytes and record (relative path -> checksum) in the record's file map
void persist(const fs::path& run_dir, const std::string& rel, const std::string& bytes,
             std::map<std::string, std::string>& files) {
    fs::path full = run_dir / rel;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    if (!out) throw computation_error("cannot write " + full.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw computation_error("short write on " + full.string());
    files[rel] = hex64(fnv1a(bytes));
}

json config_to_json(const SweepConfig& c) {
    return json{{"system_dim", c.system_dim},
                {"nu_list", c.nu_list},
                {"include_ginue", c.include_ginue},
                {"realizations", c.realizations},
                {"initial_states", c.initial_states},
                {"hamiltonian_mode", c.hamiltonian_mode},
                {"dynamics", c.dynamics},
                {"grid_points", c.grid_points},
                {"dump_superoperators", c.dump_superoperators},
                {"alpha", c.alpha},
                {"hbar", c.hbar},
                {"master_seed", c.master_seed},
                {"output_dir", c.output_dir},
                {"worker_count", c.worker_count}};
}

SweepConfig config_from_json(const json& j) {
    SweepConfig c;
    c.system_dim = j.value("system_dim", c.system_dim);
    c.nu_list = j.value("nu_list", c.nu_list);
    c.include_ginue = j.value("include_ginue", c.include_ginue);
    c.realizations = j.value("realizations", c.realizations);
    c.initial_states = j.value("initial_states", c.initial_states);
    c.hamiltonian_mode = j.value("hamiltonian_mode", c.hamiltonian_mode);
    c.dynamics = j.value("dynamics", c.dynamics);
    c.grid_points = j.value("grid_points", c.grid_points);
    c.dump_superoperators = j.value("dump_superoperators", c.dump_superoperators);
    c.alpha = j.value("alpha", c.alpha);
    c.hbar = j.value("hbar", c.hbar);
    c.master_seed = j.value("master_seed", c.master_seed);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.worker_count = j.value("worker_count", c.worker_count);
    return c;
}

json record_to_json(const RealizationRecord& r) {
    return json{{"ensemble", r.ensemble},
                {"realization", r.realization},
                {"status", r.status},
                {"message", r.message},
                {"seeds",
                 {{"kossakowski", r.seed_kossakowski},
                  {"hamiltonian", r.seed_hamiltonian},
                  {"perturbation", r.seed_perturbation}}},
                {"gap", r.gap},
                {"mean_petermann", r.mean_petermann},
                {"steady_state_distance", r.steady_state_distance},
                {"trace_h2", r.trace_h2},
                {"flagged_modes", r.flagged_modes},
                {"files", r.files}};
}

RealizationRecord record_from_json(const json& j) {
    RealizationRecord r;
    r.ensemble = j.at("ensemble").get<std::string>();
    r.realization = j.at("realization").get<int>();
    r.status = j.at("status").get<std::string>();
    r.message = j.value("message", std::string{});
    const json& seeds = j.at("seeds");
    r.seed_kossakowski = seeds.value("kossakowski", 0ull);
    r.seed_hamiltonian = seeds.value("hamiltonian", 0ull);
    r.seed_perturbation = seeds.value("perturbation", 0ull);
    r.gap = j.value("gap", 0.0);
    r.mean_petermann = j.value("mean_petermann", 0.0);
    r.steady_state_distance = j.value("steady_state_distance", 0.0);
    r.trace_h2 = j.value("trace_h2", 0.0);
    r.flagged_modes = j.value("flagged_modes", 0);
    if (j.contains("files"))
        r.files = j.at("files").get<std::map<std::string, std::string>>();
    return r;
}

std::string realization_dir(const EnsembleId& ens, int r) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d", r);
    return ens.label() + "/" + buf;
}

// one (ensemble, realization) unit of work; exceptions become status "failed"
RealizationRecord run_one(const SweepConfig& cfg, const EnsembleId& ens, int r,
                          const fs::path& run_dir) {
    using namespace roqs::ensembles;
    RealizationRecord rec;
    rec.ensemble = ens.label();
    rec.realization = r;
    rec.seed_kossakowski = realization_stream(ens, r, StreamRole::kossakowski);
    rec.seed_hamiltonian = realization_stream(ens, r, StreamRole::hamiltonian);
    rec.seed_perturbation = realization_stream(ens, r, StreamRole::perturbation);
    const std::string dir = realization_dir(ens, r);

    try {
        const int n = cfg.system_dim;
        const int m = n * n - 1;

        StreamRng rng_k({cfg.master_seed, rec.seed_kossakowski});
        Matrix x = ens.ginue ? sample_ginibre(m, rng_k)
                             : sample_student_t_matrix(m, ens.nu, rng_k);
        Matrix k = build_kossakowski(x, n);

        Matrix h = Matrix::Zero(n, n);
        if (cfg.hamiltonian_mode == "gue") {
            StreamRng rng_h({cfg.master_seed, rec.seed_hamiltonian});
            h = sample_gue_hamiltonian(n, rng_h);
            rec.trace_h2 = (h * h).trace().real();
        }

        auto model = liouville::make_model(h, k, cfg.alpha, cfg.hbar);
        auto sup = liouville::build_superoperator(model);
        if (cfg.dump_superoperators) {
            liouville::dump_superoperator(sup, (run_dir / dir / "L.bin").string());
            std::ifstream in(run_dir / dir / "L.bin", std::ios::binary);
            std::stringstream raw;
            raw << in.rdbuf();
            rec.files[dir + "/L.bin"] = hex64(fnv1a(raw.str()));
        }

        auto dec = spectral::decompose(sup);
        RealVector km = spectral::petermann_factors(dec);
        RealVector qf = spectral::q_factors(dec);
        RealVector sp = spectral::nn_spacings(dec);
        rec.gap = spectral::spectral_gap(dec);
        rec.steady_state_distance = spectral::steady_state_distance(dec);

        double km_sum = 0.0;
        int km_count = 0;
        std::string eigs = "realization_id,mode_index,re_lambda,im_lambda,petermann,"
                           "q_factor,nn_spacing,flagged\n";
        for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
            bool flag = dec.flagged[static_cast<std::size_t>(i)];
            if (flag)
                ++rec.flagged_modes;
            else {
                km_sum += km(i);
                ++km_count;
            }
            eigs += std::to_string(r) + "," + std::to_string(i) + "," +
                    g17(dec.eigenvalues(i).real()) + "," + g17(dec.eigenvalues(i).imag()) +
                    "," + g17(km(i)) + "," + g17(qf(i)) + "," + g17(sp(i)) + "," +
                    (flag ? "1" : "0") + "\n";
        }
        rec.mean_petermann = km_count > 0 ? km_sum / km_count : 0.0;
        persist(run_dir, dir + "/eigs.csv", eigs, rec.files);

        json summary{{"ensemble", rec.ensemble},
                     {"realization", r},
                     {"system_dim", n},
                     {"gap", rec.gap},
                     {"mean_petermann", rec.mean_petermann},
                     {"flagged_modes", rec.flagged_modes},
                     {"steady_state_distance", rec.steady_state_distance},
                     {"trace_h2", rec.trace_h2},
                     {"operator_norm", dec.operator_norm},
                     {"zero_mode_abs", std::abs(dec.eigenvalues(0))},
                     {"trace_residual", sup.trace_residual}};

        int unreliable_states = 0, failed_states = 0;
        if (cfg.dynamics) {
            Matrix v = dynamics::make_perturbation(n, SeedSpec{cfg.master_seed,
                                                               rec.seed_perturbation});
            auto dl = spectral::build_delta_superoperator(v, cfg.hbar);
            auto dec_v = spectral::decompose(sup.matrix + dl.matrix);

            json states = json::array();
            for (int s = 0; s < cfg.initial_states; ++s) {
                json entry{{"state", s}};
                try {
                    std::uint64_t seed_s = initial_state_stream(ens, r, s);
                    Matrix rho0 = sample_haar_pure_state(n, SeedSpec{cfg.master_seed, seed_s});

                    auto choice = dynamics::choose_time_grid(dec, rho0, cfg.grid_points);
                    auto base = dynamics::propagate_coherence(dec, rho0, choice.grid);
                    auto pert = dynamics::propagate_coherence(dec_v, rho0, choice.grid);
                    auto fit = dynamics::fit_coherence_time(choice.grid, base.coherence);
                    auto pm = dynamics::coherence_perturbation_metrics(
                        base.coherence, pert.coherence, choice.grid, fit.coherence_time);

                    auto traj_csv = [&](const dynamics::TrajectoryRecord& t) {
                        std::string out = "realization_id,init_state_id,t,coherence,entropy\n";
                        for (std::size_t i = 0; i < t.grid.points.size(); ++i)
                            out += std::to_string(r) + "," + std::to_string(s) + "," +
                                   g17(t.grid.points[i]) + "," + g17(t.coherence[i]) + "," +
                                   g17(t.entropy[i]) + "\n";
                        return out;
                    };
                    persist(run_dir, dir + "/traj_" + std::to_string(s) + ".csv",
                            traj_csv(base), rec.files);
                    persist(run_dir, dir + "/traj_" + std::to_string(s) + "_pert.csv",
                            traj_csv(pert), rec.files);

                    bool unreliable = base.unreliable || pert.unreliable;
                    if (unreliable) ++unreliable_states;
                    entry.update(json{
                        {"t2", fit.coherence_time},
                        {"amplitude", fit.amplitude},
                        {"offset", fit.offset},
                        {"rms_residual", fit.rms_residual},
                        {"converged", fit.converged},
                        {"delta_t2", pm.delta_t2},
                        {"delta_t2_relative", pm.delta_t2_relative},
                        {"delta_ce", pm.delta_ce},
                        {"unreliable", unreliable},
                        {"trace_error", std::max(base.trace_error, pert.trace_error)},
                        {"positivity_error",
                         std::max(base.positivity_error, pert.positivity_error)},
                        {"hermiticity_residual",
                         std::max(base.hermiticity_residual, pert.hermiticity_residual)},
                        {"grid_t_end", choice.grid.points.back()},
                        {"grid_hit_cap", choice.hit_cap},
                        {"error", ""}});
                } catch (const std::exception& e) {
                    ++failed_states;
                    entry["error"] = e.what();
                }
                states.push_back(entry);
            }
            summary["states"] = states;
        }
        persist(run_dir, dir + "/summary.json", summary.dump(2) + "\n", rec.files);

        if (rec.flagged_modes > 0 || unreliable_states > 0 || failed_states > 0) {
            rec.status = "flagged";
            rec.message = std::to_string(rec.flagged_modes) + " flagged modes, " +
                          std::to_string(unreliable_states) + " unreliable states, " +
                          std::to_string(failed_states) + " failed states";
        } else {
            rec.status = "ok";
        }
    } catch (const std::exception& e) {
        rec.status = "failed";
        rec.message = e.what();
    }
    return rec;
}

// ---- CSV / summary readers -------------------------------------------------

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    return out;
}

// realization subdirectories of <run>/<ensemble>, sorted numerically
std::vector<fs::path> realization_dirs(const fs::path& run_dir, const std::string& ensemble) {
    fs::path base = run_dir / ensemble;
    if (!fs::exists(base))
        throw computation_error("no data for ensemble '" + ensemble + "' under " +
                                run_dir.string());
    std::vector<std::pair<int, fs::path>> found;
    for (const auto& entry : fs::directory_iterator(base)) {
        if (!entry.is_directory()) continue;
        try {
            found.emplace_back(std::stoi(entry.path().filename().string()), entry.path());
        } catch (const std::exception&) {
            continue;  // stray non-numeric directory
        }
    }
    std::sort(found.begin(), found.end());
    std::vector<fs::path> out;
    out.reserve(found.size());
    for (auto& f : found) out.push_back(f.second);
    return out;
}

}  // namespace

std::string EnsembleId::label() const {
    if (ginue) return "ginue";
    char buf[32];
    std::snprintf(buf, sizeof buf, "nu%g", nu);
    return buf;
}

std::uint64_t EnsembleId::stream_code() const {
    if (ginue) return 0x67696e7565ull;  // ascii "ginue", never a positive double
    return std::bit_cast<std::uint64_t>(nu);
}

std::uint64_t realization_stream(const EnsembleId& ens, int realization, StreamRole role) {
    return ensembles::derive_stream(ens.stream_code(),
                                    static_cast<std::uint64_t>(realization),
                                    static_cast<std::uint64_t>(role));
}

std::uint64_t initial_state_stream(const EnsembleId& ens, int realization, int state) {
    return ensembles::derive_stream(ens.stream_code(),
                                    static_cast<std::uint64_t>(realization),
                                    role_state_base + static_cast<std::uint64_t>(state));
}

std::vector<EnsembleId> SweepConfig::ensembles() const {
    std::vector<EnsembleId> out;
    for (double nu : nu_list) out.push_back({false, nu});
    if (include_ginue) out.push_back({true, 0.0});
    return out;
}

void validate_config(const SweepConfig& config) {
    if (config.system_dim < 2) throw invalid_input("config: system_dim must be >= 2");
    if (config.realizations < 1) throw invalid_input("config: realizations must be >= 1");
    for (double nu : config.nu_list)
        if (!(nu > 0.0)) throw invalid_input("config: every nu must be positive");
    if (config.nu_list.empty() && !config.include_ginue)
        throw invalid_input("config: no ensembles selected");
    if (config.hamiltonian_mode != "zero" && config.hamiltonian_mode != "gue")
        throw invalid_input("config: hamiltonian_mode must be 'zero' or 'gue'");
    if (config.dynamics && config.initial_states < 1)
        throw invalid_input("config: dynamics needs initial_states >= 1");
    if (config.grid_points < 8) throw invalid_input("config: grid_points must be >= 8");
    if (!(config.alpha > 0.0) || !(config.hbar > 0.0))
        throw invalid_input("config: alpha and hbar must be positive");
    if (config.worker_count < 0) throw invalid_input("config: worker_count must be >= 0");
    if (config.output_dir.empty()) throw invalid_input("config: output_dir is empty");
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot read config file " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw invalid_input("config parse error in " + path + ": " + e.what());
    }
    SweepConfig c = config_from_json(j);
    validate_config(c);
    return c;
}

void save_config(const SweepConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw computation_error("cannot write config file " + path);
    out << config_to_json(config).dump(2) << "\n";
}

SweepConfig desk_config() {
    SweepConfig c;
    c.system_dim = 20;
    c.realizations = 16;
    c.initial_states = 5;
    return c;
}

SweepConfig paper_config() { return SweepConfig{}; }

RunManifest run_sweep(const SweepConfig& config) {
    validate_config(config);
    const fs::path run_dir = config.output_dir;
    fs::create_directories(run_dir);

    struct Task {
        EnsembleId ens;
        int realization;
    };
    std::vector<Task> tasks;
    for (const EnsembleId& ens : config.ensembles())
        for (int r = 0; r < config.realizations; ++r) tasks.push_back({ens, r});

    auto t_start = std::chrono::steady_clock::now();
    std::vector<RealizationRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) break;
            records[i] = run_one(config, tasks[i].ens, tasks[i].realization, run_dir);
        }
    };
    unsigned workers = config.worker_count > 0
                           ? static_cast<unsigned>(config.worker_count)
                           : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(tasks.size()));
    if (workers <= 1) {
        drain();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
        for (auto& th : pool) th.join();
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                      .count();

    RunManifest manifest;
    manifest.config = config;
    manifest.version = version_string;
    manifest.wall_clock_seconds = wall;
    manifest.records = std::move(records);
    manifest.run_dir = run_dir.string();
    if (config.hamiltonian_mode == "gue") {
        double acc = 0.0;
        int cnt = 0;
        for (const auto& rec : manifest.records)
            if (rec.status != "failed") {
                acc += rec.trace_h2;
                ++cnt;
            }
        manifest.mean_trace_h2 = cnt > 0 ? acc / cnt : 0.0;
    }

    json j{{"version", manifest.version},
           {"wall_clock_seconds", manifest.wall_clock_seconds},
           {"mean_trace_h2", manifest.mean_trace_h2},
           {"config", config_to_json(config)},
           {"realizations", json::array()}};
    for (const auto& rec : manifest.records) j["realizations"].push_back(record_to_json(rec));
    std::ofstream out(run_dir / "manifest.json");
    if (!out) throw computation_error("cannot write manifest.json");
    out << j.dump(2) << "\n";
    return manifest;
}

RunManifest load_manifest(const std::string& run_dir) {
    fs::path dir = run_dir;
    std::ifstream in(dir / "manifest.json");
    if (!in) throw invalid_input("no manifest.json under " + run_dir);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw computation_error(std::string("manifest parse error: ") + e.what());
    }
    RunManifest manifest;
    manifest.version = j.value("version", std::string{});
    manifest.wall_clock_seconds = j.value("wall_clock_seconds", 0.0);
    manifest.mean_trace_h2 = j.value("mean_trace_h2", 0.0);
    manifest.config = config_from_json(j.at("config"));
    for (const json& rj : j.at("realizations"))
        manifest.records.push_back(record_from_json(rj));
    manifest.run_dir = run_dir;
    for (const auto& rec : manifest.records)
        for (const auto& [rel, checksum] : rec.files) {
            (void)checksum;
            if (!fs::exists(dir / rel))
                throw computation_error("manifest references missing file " + rel);
        }
    return manifest;
}

std::vector<EigenvalueRow> load_eigenvalues(const std::string& run_dir,
                                            const std::string& ensemble) {
    std::vector<EigenvalueRow> rows;
    for (const fs::path& dir : realization_dirs(run_dir, ensemble)) {
        std::ifstream in(dir / "eigs.csv");
        if (!in) continue;  // failed realization left no table
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            auto f = split_csv(line);
            if (f.size() != 8) throw computation_error("malformed eigs.csv row: " + line);
            EigenvalueRow row;
            row.realization = std::stoi(f[0]);
            row.mode = std::stoi(f[1]);
            row.re = std::strtod(f[2].c_str(), nullptr);
            row.im = std::strtod(f[3].c_str(), nullptr);
            row.petermann = std::strtod(f[4].c_str(), nullptr);
            row.q = std::strtod(f[5].c_str(), nullptr);
            row.spacing = std::strtod(f[6].c_str(), nullptr);
            row.flagged = f[7] == "1";
            rows.push_back(row);
        }
    }
    if (rows.empty())
        throw computation_error("no eigenvalue data for ensemble '" + ensemble + "'");
    return rows;
}

std::vector<StateMetricsRow> load_state_metrics(const std::string& run_dir,
                                                const std::string& ensemble) {
    std::vector<StateMetricsRow> rows;
    for (const fs::path& dir : realization_dirs(run_dir, ensemble)) {
        std::ifstream in(dir / "summary.json");
        if (!in) continue;
        json j;
        in >> j;
        if (!j.contains("states")) continue;
        for (const json& st : j.at("states")) {
            StateMetricsRow row;
            row.realization = j.at("realization").get<int>();
            row.state = st.at("state").get<int>();
            row.error = st.value("error", std::string{});
            if (row.error.empty()) {
                row.t2 = st.at("t2").get<double>();
                row.delta_t2 = st.at("delta_t2").get<double>();
                row.delta_t2_relative = st.at("delta_t2_relative").get<double>();
                row.delta_ce = st.at("delta_ce").get<double>();
                row.converged = st.at("converged").get<bool>();
                row.unreliable = st.at("unreliable").get<bool>();
            }
            rows.push_back(row);
        }
    }
    if (rows.empty())
        throw computation_error("no dynamics data for ensemble '" + ensemble +
                                "' (run a sweep with dynamics enabled)");
    return rows;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) throw invalid_input("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw invalid_input("quantile: p outside [0, 1]");
    std::sort(values.begin(), values.end());
    double h = p * static_cast<double>(values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= values.size()) return values.back();
    double w = h - static_cast<double>(lo);
    return values[lo] * (1.0 - w) + values[lo + 1] * w;
}

// ---- figure emitters -------------------------------------------------------

namespace {

void write_figure_file(const fs::path& path, const std::string& bytes,
                       std::vector<std::string>& written) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw computation_error("cannot write " + path.string());
    out << bytes;
    written.push_back(path.string());
}

// ensemble labels configured in the manifest, in sweep order
std::vector<std::string> manifest_labels(const RunManifest& m) {
    std::vector<std::string> out;
    for (const EnsembleId& e : m.config.ensembles()) out.push_back(e.label());
    return out;
}

void require_ensemble(const RunManifest& m, const std::string& label,
                      const std::string& figure_id) {
    auto labels = manifest_labels(m);
    if (std::find(labels.begin(), labels.end(), label) == labels.end())
        throw computation_error(figure_id + " requires a sweep that includes ensemble '" +
                                label + "'");
}

// fresh scalar samples of the interaction-matrix entry distribution
std::vector<double> figure_samples(const RunManifest& m, const EnsembleId& ens,
                                   std::size_t count) {
    using namespace roqs::ensembles;
    StreamRng rng({m.config.master_seed, realization_stream(ens, 0, StreamRole::figure)});
    std::vector<double> out(count);
    for (double& v : out) {
        if (ens.ginue)
            v = rng.normal() * std::sqrt(0.5);
        else
            v = rng.normal() / std::sqrt(2.0 * rng.chi_squared(ens.nu) / ens.nu);
    }
    return out;
}

void emit_fig1(const RunManifest& m, const fs::path& out_dir,
               std::vector<std::string>& written) {
    using namespace roqs::ensembles;
    const std::size_t count = 200000;
    for (const EnsembleId& ens : m.config.ensembles()) {
        std::vector<double> samples = figure_samples(m, ens, count);
        auto theory = [&](double x) {
            return ens.ginue ? ginue_entry_pdf(x) : student_t_pdf(x, ens.nu);
        };

        // central window, linear bins, density normalized by the total draw
        // count so heavy tails outside the window do not inflate the bulk
        const double lo = -8.0, hi = 8.0;
        const int bins = 160;
        std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
        for (double v : samples)
            if (v >= lo && v < hi)
                ++counts[static_cast<std::size_t>((v - lo) / (hi - lo) * bins)];
        const double width = (hi - lo) / bins;
        std::string pdf = "x,density,theory\n";
        for (int b = 0; b < bins; ++b) {
            double center = lo + (b + 0.5) * width;
            double density = static_cast<double>(counts[static_cast<std::size_t>(b)]) /
                             (static_cast<double>(count) * width);
            pdf += g17(center) + "," + g17(density) + "," + g17(theory(center)) + "\n";
        }
        write_figure_file(out_dir / ("pdf_" + ens.label() + ".csv"), pdf, written);

        // folded tail |x| >= 1 on geometric bins; theory is the two-sided pdf
        double max_abs = 1.0;
        for (double v : samples) max_abs = std::max(max_abs, std::abs(v));
        const int tail_bins = 40;
        double ratio = std::pow(max_abs * 1.0000001, 1.0 / tail_bins);
        std::vector<std::size_t> tcounts(static_cast<std::size_t>(tail_bins), 0);
        for (double v : samples) {
            double a = std::abs(v);
            if (a < 1.0) continue;
            auto b = static_cast<std::size_t>(std::log(a) / std::log(ratio));
            if (b < tcounts.size()) ++tcounts[b];
        }
        std::string tail = "abs_x,density,theory\n";
        for (int b = 0; b < tail_bins; ++b) {
            double left = std::pow(ratio, b), right = std::pow(ratio, b + 1);
            double center = std::sqrt(left * right);
            double density = static_cast<double>(tcounts[static_cast<std::size_t>(b)]) /
                             (static_cast<double>(count) * (right - left));
            tail += g17(center) + "," + g17(density) + "," + g17(2.0 * theory(center)) + "\n";
        }
        write_figure_file(out_dir / ("tail_" + ens.label() + ".csv"), tail, written);
    }
}

// max Q over the unflagged GinUE pool: the empirical Q-bound reference slope
double ginue_q_reference(const RunManifest& m) {
    double best = 0.0;
    for (const EigenvalueRow& row : load_eigenvalues(m.run_dir, "ginue"))
        if (!row.flagged && std::isfinite(row.q)) best = std::max(best, row.q);
    return best;
}

void emit_scatter(const RunManifest& m, const std::vector<std::string>& labels,
                  const fs::path& out_dir, const std::string& figure_id,
                  std::vector<std::string>& written) {
    require_ensemble(m, "ginue", figure_id);
    for (const std::string& label : labels) require_ensemble(m, label, figure_id);
    for (const std::string& label : labels) {
        std::string csv = "realization_id,re_lambda,im_lambda,petermann,flagged\n";
        for (const EigenvalueRow& row : load_eigenvalues(m.run_dir, label))
            csv += std::to_string(row.realization) + "," + g17(row.re) + "," + g17(row.im) +
                   "," + g17(row.petermann) + "," + (row.flagged ? "1" : "0") + "\n";
        write_figure_file(out_dir / ("scatter_" + label + ".csv"), csv, written);
    }
    write_figure_file(out_dir / "qbound.csv",
                      "max_q_ginue\n" + g17(ginue_q_reference(m)) + "\n", written);
}

std::string quartile_rows(const std::string& label, const std::string& metric,
                          const std::vector<double>& pool) {
    return label + "," + metric + "," + std::to_string(pool.size()) + "," +
           g17(quantile(pool, 0.25)) + "," + g17(quantile(pool, 0.5)) + "," +
           g17(quantile(pool, 0.75)) + "\n";
}

void emit_spectral_summary(const RunManifest& m, const fs::path& out_dir, bool gaps_ccdf,
                           bool petermann_spacings, std::vector<std::string>& written) {
    auto labels = manifest_labels(m);

    if (gaps_ccdf) {
        std::string gaps = "ensemble,metric,count,q1,median,q3\n";
        for (const std::string& label : labels) {
            std::vector<double> pool;
            for (const auto& rec : m.records)
                if (rec.ensemble == label && rec.status != "failed") pool.push_back(rec.gap);
            if (pool.empty())
                throw computation_error("no surviving realizations for ensemble " + label);
            gaps += quartile_rows(label, "gap", pool);
        }
        write_figure_file(out_dir / "gaps.csv", gaps, written);

        // shared threshold grid (including -1, the half-relaxed reference point)
        double g_min = 0.0;
        std::map<std::string, std::vector<double>> re_pools;
        for (const std::string& label : labels) {
            auto& pool = re_pools[label];
            for (const EigenvalueRow& row : load_eigenvalues(m.run_dir, label))
                if (!row.flagged) {
                    pool.push_back(row.re);
                    g_min = std::min(g_min, row.re);
                }
        }
        std::vector<double> grid;
        for (int i = 0; i <= 200; ++i)
            grid.push_back(g_min + (0.0 - g_min) * static_cast<double>(i) / 200.0);
        grid.push_back(-1.0);
        std::sort(grid.begin(), grid.end());
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        std::string ccdf = "ensemble,g,ccdf\n";
        for (const std::string& label : labels) {
            std::vector<double> c = spectral::empirical_ccdf(re_pools[label], grid);
            for (std::size_t i = 0; i < grid.size(); ++i)
                ccdf += label + "," + g17(grid[i]) + "," + g17(c[i]) + "\n";
        }
        write_figure_file(out_dir / "ccdf.csv", ccdf, written);
    }

    if (petermann_spacings) {
        std::string km = "ensemble,metric,count,q1,median,q3\n";
        for (const std::string& label : labels) {
            std::vector<double> pool;
            for (const auto& rec : m.records)
                if (rec.ensemble == label && rec.status != "failed")
                    pool.push_back(rec.mean_petermann);
            if (pool.empty())
                throw computation_error("no surviving realizations for ensemble " + label);
            km += quartile_rows(label, "mean_petermann", pool);
        }
        write_figure_file(out_dir / "petermann.csv", km, written);

        std::string sp = "ensemble,bin_left,bin_right,density\n";
        for (const std::string& label : labels) {
            std::vector<double> pool;
            for (const EigenvalueRow& row : load_eigenvalues(m.run_dir, label))
                if (!row.flagged) pool.push_back(row.spacing);
            spectral::Histogram h = spectral::pdf_histogram(pool, 50, true);
            for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
                sp += label + "," + g17(h.edges[b]) + "," + g17(h.edges[b + 1]) + "," +
                      g17(h.density[b]) + "\n";
        }
        write_figure_file(out_dir / "spacings.csv", sp, written);
    }
}

void emit_q_quartiles(const RunManifest& m, const fs::path& out_dir,
                      std::vector<std::string>& written) {
    std::string csv = "ensemble,subset,count,q1,median,q3\n";
    for (const std::string& label : manifest_labels(m)) {
        std::vector<double> pool;
        for (const EigenvalueRow& row : load_eigenvalues(m.run_dir, label))
            if (!row.flagged && std::isfinite(row.q)) pool.push_back(row.q);
        if (pool.empty())
            throw computation_error("no finite Q factors for ensemble " + label);
        std::sort(pool.begin(), pool.end(), std::greater<>());
        auto subset = [&](double fraction) {
            std::size_t keep = std::max<std::size_t>(
                1, static_cast<std::size_t>(fraction * static_cast<double>(pool.size())));
            return std::vector<double>(pool.begin(),
                                       pool.begin() + static_cast<std::ptrdiff_t>(keep));
        };
        csv += quartile_rows(label, "all", pool);
        csv += quartile_rows(label, "top10", subset(0.10));
        csv += quartile_rows(label, "top1", subset(0.01));
    }
    write_figure_file(out_dir / "qfactors.csv", csv, written);
}

void copy_trajectories(const RunManifest& m, const fs::path& out_dir,
                       const std::string& file_name, bool first_realization_only,
                       std::vector<std::string>& written) {
    if (!m.config.dynamics)
        throw computation_error(
            "trajectory figures require a sweep run with dynamics enabled");
    std::string csv = "ensemble,perturbed,realization_id,init_state_id,t,coherence,entropy\n";
    for (const std::string& label : manifest_labels(m)) {
        for (const fs::path& dir : realization_dirs(m.run_dir, label)) {
            for (int s = 0; s < m.config.initial_states; ++s) {
                for (int pert = 0; pert < 2; ++pert) {
                    fs::path file = dir / ("traj_" + std::to_string(s) +
                                           (pert ? "_pert.csv" : ".csv"));
                    std::ifstream in(file);
                    if (!in) continue;  // state failed in the sweep
                    std::string line;
                    std::getline(in, line);  // header
                    while (std::getline(in, line))
                        csv += label + "," + std::to_string(pert) + "," + line + "\n";
                }
            }
            if (first_realization_only) break;
        }
    }
    write_figure_file(out_dir / file_name, csv, written);
}

void emit_sensitivity(const RunManifest& m, const fs::path& out_dir,
                      std::vector<std::string>& written) {
    if (!m.config.dynamics)
        throw computation_error("fig4 requires a sweep run with dynamics enabled");
    std::string csv = "ensemble,metric,count,q1,median,q3\n";
    for (const std::string& label : manifest_labels(m)) {
        std::vector<double> t2, dt2, dt2r, dce;
        for (const StateMetricsRow& row : load_state_metrics(m.run_dir, label)) {
            if (!row.error.empty()) continue;
            t2.push_back(row.t2);
            dt2.push_back(row.delta_t2);
            dt2r.push_back(row.delta_t2_relative);
            dce.push_back(row.delta_ce);
        }
        if (t2.empty())
            throw computation_error("no usable dynamics records for ensemble " + label);
        csv += quartile_rows(label, "t2", t2);
        csv += quartile_rows(label, "delta_t2", dt2);
        csv += quartile_rows(label, "delta_t2_relative", dt2r);
        csv += quartile_rows(label, "delta_ce", dce);
    }
    write_figure_file(out_dir / "sensitivity.csv", csv, written);
    copy_trajectories(m, out_dir, "trajectories.csv", true, written);
}

}  // namespace

std::vector<std::string> emit_figure_data(const RunManifest& manifest,
                                          const std::string& figure_id) {
    const fs::path out_dir = fs::path(manifest.run_dir) / "figures" / figure_id;
    std::vector<std::string> written;
    if (figure_id == "fig1") {
        emit_fig1(manifest, out_dir, written);
    } else if (figure_id == "fig2") {
        emit_scatter(manifest, {"nu1", "ginue"}, out_dir, figure_id, written);
    } else if (figure_id == "s1") {
        emit_scatter(manifest, {"nu2"}, out_dir, figure_id, written);
    } else if (figure_id == "s2") {
        emit_scatter(manifest, {"nu3"}, out_dir, figure_id, written);
    } else if (figure_id == "s3") {
        emit_scatter(manifest, {"nu4"}, out_dir, figure_id, written);
    } else if (figure_id == "fig3") {
        emit_spectral_summary(manifest, out_dir, true, true, written);
    } else if (figure_id == "s5") {
        emit_spectral_summary(manifest, out_dir, true, false, written);
    } else if (figure_id == "s6") {
        emit_spectral_summary(manifest, out_dir, false, true, written);
    } else if (figure_id == "s4") {
        emit_q_quartiles(manifest, out_dir, written);
    } else if (figure_id == "fig4") {
        emit_sensitivity(manifest, out_dir, written);
    } else if (figure_id == "s7") {
        copy_trajectories(manifest, out_dir, "trajectories_all.csv", false, written);
    } else {
        throw invalid_input("unknown figure id '" + figure_id +
                            "' (expected fig1..fig4 or s1..s7)");
    }
    return written;
}

}  // namespace roqs::runner
