#pragma once

// Seeded simulation, experiment runs, parameter sweeps and file output.
//
// A run writes into its output directory:
//   manifest.json          config echo, content hash, wall time, bound values
//   trace_seed<k>.csv      t,instant,cumulative for t in (t_p, T]
//   summary.csv            cumulative regret per seed, then mean and std
// and optionally steps_seed<k>.csv and tree_seed<k>.jsonl.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pshift/analysis.hpp"
#include "pshift/config.hpp"
#include "pshift/environment.hpp"
#include "pshift/pareto.hpp"
#include "pshift/policy.hpp"
#include "pshift/rng.hpp"

namespace pshift {

/// Shortest text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Simulation --------------------------------------------------------------

/// Called after every round with the 1-based round number.
using StepObserver = std::function<void(std::uint64_t, const StepRecord&)>;

struct SeedRun {
    std::uint64_t seed = 0;
    RegretTrace trace;
    RuntimeChecks checks;
    PartitionReport partition;
    /// Rounds after warm-up in which an arm of the true front at x_t was
    /// missing from the refined active set.
    std::uint64_t oracle_eliminations = 0;
    unsigned max_depth = 0;
    std::size_t leaves = 0;
    std::string tree_jsonl;
    std::string steps_csv;
};

namespace harness_detail {

inline std::string join_arms(const std::vector<std::size_t>& arms) {
    std::string s;
    for (std::size_t i = 0; i < arms.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(arms[i]);
    }
    return s;
}

}  // namespace harness_detail

inline SeedRun simulate(const RunConfig& cfg, std::uint64_t seed, const StepObserver& observer = {}) {
    const ShiftSchedule schedule = cfg.schedule();
    const Instance& inst = cfg.instance;
    Rng context_rng = derive_stream(seed, kContextStream);
    Rng noise_rng = derive_stream(seed, kNoiseStream);
    Rng arm_rng = derive_stream(seed, kArmStream);

    SeedRun out;
    out.seed = seed;
    std::ostringstream steps;
    if (cfg.outputs.step_trace) steps << "t,context,bin_depth,bin_index,warmup,played_arm,support,split\n";

    auto loop = [&](auto& policy) {
        for (std::uint64_t t = 1; t <= schedule.horizon(); ++t) {
            const Context x = sample_context(schedule, t, context_rng);
            const StepRecord rec = policy.step(x, [&](std::size_t k) { return inst.draw_reward(k, x, cfg.noise_sigma, noise_rng); });
            const auto means = inst.all_means(x);
            const auto oracle = pareto_set(std::span<const RewardVector>(means), cfg.cone);
            if (!rec.warmup) {
                for (auto k : oracle) {
                    if (!std::binary_search(rec.active_set.begin(), rec.active_set.end(), k)) {
                        ++out.oracle_eliminations;
                        break;
                    }
                }
            }
            if (t > schedule.change_point()) {
                std::vector<RewardVector> oracle_means;
                for (auto k : oracle) oracle_means.push_back(clamp_to_floor(means[k]));
                const auto policy_means = policy_front_means(means, rec.support, cfg.cone);
                out.trace.push(t, instant_regret(policy_means, oracle_means, cfg.cone, cfg.gap));
            }
            if (cfg.outputs.step_trace) {
                steps << t << ',' << format_double(x(0)) << ',' << rec.bin.depth << ',' << rec.bin.index << ','
                      << rec.warmup << ',' << rec.played_arm << ',' << harness_detail::join_arms(rec.support) << ','
                      << rec.split_occurred << '\n';
            }
            if (observer) observer(t, rec);
        }
    };

    out.trace.seed = seed;
    if (cfg.policy.kind == PolicyKind::algorithm1) {
        ParetoTreePolicy policy(cfg.policy_params(), cfg.cone, inst.context_dim(), arm_rng);
        loop(policy);
        out.checks = policy.checks();
        out.partition = policy.tree().check_invariants();
        out.max_depth = policy.tree().max_depth();
        out.leaves = policy.tree().leaves().size();
        if (cfg.outputs.tree_dump) {
            std::ostringstream tree;
            policy.tree().dump_jsonl(tree);
            out.tree_jsonl = tree.str();
        }
    } else {
        RandomBaseline policy(inst.arms(), inst.objectives(), arm_rng);
        loop(policy);
        out.partition.leaf_volume = 1.0;
        out.leaves = 1;
    }
    out.steps_csv = steps.str();
    return out;
}

// Traces and summaries ----------------------------------------------------

inline std::string trace_csv(const RegretTrace& trace) {
    std::string s = "t,instant,cumulative\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        s += std::to_string(trace.rounds[i]) + ',' + format_double(trace.instant[i]) + ',' + format_double(trace.cumulative[i]) + '\n';
    }
    return s;
}

inline RegretTrace read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open trace " + path);
    RegretTrace trace;
    std::string line;
    std::getline(in, line);
    if (line != "t,instant,cumulative") throw IoError(path + ": unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string t, inst, cum;
        if (!std::getline(row, t, ',') || !std::getline(row, inst, ',') || !std::getline(row, cum)) {
            throw IoError(path + ": malformed row \"" + line + "\"");
        }
        trace.rounds.push_back(std::stoull(t));
        trace.instant.push_back(std::stod(inst));
        trace.cumulative.push_back(std::stod(cum));
    }
    return trace;
}

struct Summary {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation, 0 for one seed
};

inline Summary summarize(const std::vector<double>& totals) {
    if (totals.empty()) throw DomainError("no totals to summarize");
    Summary s;
    for (double v : totals) s.mean += v;
    s.mean /= static_cast<double>(totals.size());
    if (totals.size() > 1) {
        double ss = 0.0;
        for (double v : totals) ss += (v - s.mean) * (v - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(totals.size() - 1));
    }
    return s;
}

// Bounds ------------------------------------------------------------------

/// Unit-constant bound values for the run; failures are reported as null
/// with a reason.
inline Json bound_overlays(const RunConfig& cfg) {
    const ShiftSchedule schedule = cfg.schedule();
    const PolicyParams pp = cfg.policy_params();
    BoundParams p;
    p.alpha = cfg.bounds.alpha;
    p.c_alpha = cfg.bounds.c_alpha;
    p.beta = pp.beta;
    p.c_beta = pp.c_beta;
    p.gamma = cfg.bounds.gamma;
    p.c_gamma = cfg.bounds.c_gamma;
    p.arms = static_cast<double>(pp.arms);
    p.objectives = static_cast<double>(pp.objectives);
    p.delta = pp.delta;
    p.change_point = static_cast<double>(schedule.change_point());
    p.horizon = static_cast<double>(schedule.horizon());

    Json out;
    out["rho_depth"] = cfg.bounds.rho_depth;
    auto attempt = [&](const char* key, auto&& f) {
        try {
            out[key] = f();
        } catch (const Error& e) {
            out[key] = nullptr;
            out[std::string(key) + "_error"] = e.what();
        }
    };
    attempt("rho_qq", [&] { return dissimilarity(schedule.target(), schedule.target(), cfg.bounds.rho_depth).value; });
    if (out["rho_qq"].is_number()) p.rho_qq = out["rho_qq"].get<double>();
    if (schedule.change_point() == 0) {
        p.rho_pq = p.rho_qq;
        attempt("no_shift", [&] { return bound_no_shift(p); });
        return out;
    }
    attempt("rho_pq", [&]() -> double {
        const auto rho = dissimilarity(effective_mixture(schedule), schedule.target(), cfg.bounds.rho_depth);
        if (rho.unbounded) throw DomainError("source misses a target cell");
        return rho.value;
    });
    if (out["rho_pq"].is_number()) p.rho_pq = out["rho_pq"].get<double>();
    if (out["rho_pq"].is_number()) attempt("single_shift", [&] { return bound_single_shift(p); });
    attempt("special_family", [&] { return bound_special_family(p); });
    attempt("multiple_shift", [&] { return bound_multiple_shift(p, schedule, cfg.bounds.rho_depth); });
    return out;
}

// Runs --------------------------------------------------------------------

struct RunOptions {
    unsigned jobs = 1;
    bool write_files = true;
};

struct RunResult {
    Json manifest;
    std::vector<SeedRun> seeds;
    Summary summary;
    std::filesystem::path output_dir;

    std::vector<double> totals() const {
        std::vector<double> v;
        for (const auto& s : seeds) v.push_back(s.trace.total());
        return v;
    }
};

namespace harness_detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

template <typename F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
    jobs = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace harness_detail

inline std::string summary_csv(const RunResult& r) {
    std::string s = "seed,cumulative_regret\n";
    for (const auto& run : r.seeds) s += std::to_string(run.seed) + ',' + format_double(run.trace.total()) + '\n';
    s += "mean," + format_double(r.summary.mean) + '\n';
    s += "std," + format_double(r.summary.std) + '\n';
    return s;
}

inline RunResult run_experiment(const RunConfig& cfg, const RunOptions& opts = {}) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    result.output_dir = cfg.output_dir;
    if (opts.write_files) {
        std::error_code ec;
        std::filesystem::create_directories(result.output_dir, ec);
        if (ec || !std::filesystem::is_directory(result.output_dir)) {
            throw IoError("cannot create output directory " + cfg.output_dir);
        }
    }
    const Json config_json = config_to_json(cfg);
    const std::string hash = content_hash(config_json);

    result.seeds.resize(cfg.seeds.size());
    harness_detail::parallel_for(cfg.seeds.size(), opts.jobs, [&](std::size_t i) {
        result.seeds[i] = simulate(cfg, cfg.seeds[i]);
        result.seeds[i].trace.config_hash = hash;
    });
    result.summary = summarize(result.totals());

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json seeds = Json::array();
    for (const auto& run : result.seeds) {
        seeds.push_back(Json{{"seed", run.seed},
                             {"trace", "trace_seed" + std::to_string(run.seed) + ".csv"},
                             {"cumulative_regret", run.trace.total()},
                             {"runtime_violations", run.checks.total()},
                             {"partition_ok", run.partition.ok()},
                             {"oracle_eliminations", run.oracle_eliminations},
                             {"max_depth", run.max_depth},
                             {"leaves", run.leaves}});
    }
    result.manifest = Json{{"schema_version", kSchemaVersion},
                           {"config", config_json},
                           {"config_hash", hash},
                           {"wall_time_seconds", wall},
                           {"bounds", bound_overlays(cfg)},
                           {"seeds", seeds},
                           {"summary", Json{{"mean", result.summary.mean}, {"std", result.summary.std}}}};

    if (opts.write_files) {
        const auto& dir = result.output_dir;
        for (const auto& run : result.seeds) {
            const auto tag = std::to_string(run.seed);
            harness_detail::write_text(dir / ("trace_seed" + tag + ".csv"), trace_csv(run.trace));
            if (cfg.outputs.step_trace) harness_detail::write_text(dir / ("steps_seed" + tag + ".csv"), run.steps_csv);
            if (cfg.outputs.tree_dump && !run.tree_jsonl.empty()) {
                harness_detail::write_text(dir / ("tree_seed" + tag + ".jsonl"), run.tree_jsonl);
            }
        }
        harness_detail::write_text(dir / "summary.csv", summary_csv(result));
        harness_detail::write_text(dir / "manifest.json", result.manifest.dump(2) + "\n");
    }
    return result;
}

/// The config echoed in a manifest.
inline RunConfig load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("/", std::string("invalid manifest JSON: ") + e.what());
    }
    if (!doc.contains("config")) throw ConfigError("/config", "manifest has no config");
    try {
        return config_from_json(doc["config"]);
    } catch (const ConfigError& e) {
        throw ConfigError("/config" + e.path(), e.what());
    }
}

// Sweeps ------------------------------------------------------------------

struct SweepCell {
    std::uint64_t change_point = 0;
    std::optional<double> nu;
    std::size_t arms = 0;
    std::string dir;
    std::optional<RunResult> result;
    std::string error;

    bool ok() const { return result.has_value(); }
};

namespace harness_detail {

inline std::optional<double> first_power_law_nu(const RunConfig& cfg) {
    for (const auto& p : cfg.phases) {
        if (p.distribution.kind() == DistributionKind::power_law) return p.distribution.nu();
    }
    return std::nullopt;
}

}  // namespace harness_detail

/// Cartesian product of the sweep axes in (t_p, nu, K) order; one run per
/// cell under output_dir/cell_<i>. A failing cell is recorded and the rest
/// still run. Writes sweep_summary.csv after all cells finish.
inline std::vector<SweepCell> sweep(const RunConfig& base, const RunOptions& opts = {}) {
    base.validate();
    const auto& ax = base.sweep;
    const std::vector<std::optional<std::uint64_t>> tps = ax.change_points.empty()
        ? std::vector<std::optional<std::uint64_t>>{std::nullopt}
        : std::vector<std::optional<std::uint64_t>>(ax.change_points.begin(), ax.change_points.end());
    const std::vector<std::optional<double>> nus = ax.nus.empty()
        ? std::vector<std::optional<double>>{std::nullopt}
        : std::vector<std::optional<double>>(ax.nus.begin(), ax.nus.end());
    const std::vector<std::optional<std::size_t>> ks = ax.arms.empty()
        ? std::vector<std::optional<std::size_t>>{std::nullopt}
        : std::vector<std::optional<std::size_t>>(ax.arms.begin(), ax.arms.end());

    std::vector<SweepCell> cells;
    for (const auto& tp : tps) {
        for (const auto& nu : nus) {
            for (const auto& k : ks) {
                SweepCell cell;
                const std::string dir = (std::filesystem::path(base.output_dir) / ("cell_" + std::to_string(cells.size()))).string();
                cell.dir = dir;
                try {
                    RunConfig cfg = base;
                    cfg.sweep = {};
                    cfg.output_dir = dir;
                    if (tp) cfg.phases.front().duration = *tp;
                    if (nu) {
                        for (auto& p : cfg.phases) {
                            if (p.distribution.kind() == DistributionKind::power_law) p.distribution = Distribution::power_law(*nu);
                        }
                    }
                    if (k) cfg.instance = Instance::appendix(*k);
                    cell.change_point = cfg.schedule().change_point();
                    cell.nu = harness_detail::first_power_law_nu(cfg);
                    cell.arms = cfg.instance.arms();
                    cell.result = run_experiment(cfg, opts);
                } catch (const std::exception& e) {
                    cell.error = e.what();
                }
                cells.push_back(std::move(cell));
            }
        }
    }

    if (opts.write_files) {
        std::string csv = "cell,t_p,nu,arms,mean_cumulative_regret,std_cumulative_regret,status\n";
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& c = cells[i];
            csv += std::to_string(i) + ',' + std::to_string(c.change_point) + ',' + (c.nu ? format_double(*c.nu) : "") + ',' +
                   std::to_string(c.arms) + ',';
            if (c.ok()) {
                csv += format_double(c.result->summary.mean) + ',' + format_double(c.result->summary.std) + ",ok\n";
            } else {
                std::string msg = c.error;
                std::replace(msg.begin(), msg.end(), ',', ';');
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                csv += ",,error: " + msg + '\n';
            }
        }
        std::filesystem::create_directories(base.output_dir);
        harness_detail::write_text(std::filesystem::path(base.output_dir) / "sweep_summary.csv", csv);
    }
    return cells;
}

// Gap tables --------------------------------------------------------------

/// Reads `label,r1,...,rM` rows after one header line.
inline ArmMeanTable read_arm_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open arm table " + path);
    ArmMeanTable table;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path + ": empty file");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string label, cell;
        std::getline(row, label, ',');
        std::vector<double> values;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
                if (cell.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw IoError(path + ":" + std::to_string(lineno) + ": not a number \"" + cell + "\"");
            }
        }
        RewardVector mu(static_cast<Eigen::Index>(values.size()));
        for (std::size_t m = 0; m < values.size(); ++m) mu(static_cast<Eigen::Index>(m)) = values[m];
        table.labels.push_back(label);
        table.means.push_back(mu);
    }
    table.validate();
    return table;
}

inline std::string gap_table_csv(const ArmMeanTable& table, const std::vector<Cone>& cones, const GapSolverConfig& cfg = {}) {
    table.validate();
    if (cones.empty()) throw DomainError("need at least one cone");
    std::string s = "label";
    for (std::size_t m = 0; m < table.dim(); ++m) s += ",r" + std::to_string(m + 1);
    for (std::size_t c = 0; c < cones.size(); ++c) s += ",pareto_c" + std::to_string(c + 1);
    for (std::size_t c = 0; c < cones.size(); ++c) s += ",delta_c" + std::to_string(c + 1);
    s += '\n';
    std::vector<std::vector<std::size_t>> fronts;
    for (const auto& cone : cones) {
        if (cone.dim() != table.dim()) throw DomainError("cone dimension differs from the table");
        fronts.push_back(pareto_set(table, cone));
    }
    char buf[32];
    for (std::size_t k = 0; k < table.size(); ++k) {
        s += table.labels[k];
        for (Eigen::Index m = 0; m < table.means[k].size(); ++m) s += ',' + Json(table.means[k](m)).dump();
        for (const auto& f : fronts) s += std::find(f.begin(), f.end(), k) != f.end() ? ",True" : ",False";
        for (std::size_t c = 0; c < cones.size(); ++c) {
            std::snprintf(buf, sizeof buf, ",%.4f", gap(k, fronts[c], table, cones[c], cfg));
            s += buf;
        }
        s += '\n';
    }
    return s;
}

inline void export_gap_table(const ArmMeanTable& table, const std::vector<Cone>& cones, const std::string& path,
                             const GapSolverConfig& cfg = {}) {
    harness_detail::write_text(path, gap_table_csv(table, cones, cfg));
}

}  // namespace pshift
