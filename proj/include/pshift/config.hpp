#pragma once

// Run configuration: a JSON document with a `schema_version` key.
//
//   {
//     "schema_version": 1,
//     "instance": {"kind": "appendix_biobjective", "arms": 20},
//     "schedule": {"phases": [{"distribution": {"kind": "power_law", "nu": 2}, "duration": 2000}],
//                  "target": {"kind": "uniform"}, "horizon": 20000},
//     "cone": "orthant",
//     "policy": {"kind": "algorithm1", "beta": 1, "c_beta": 1, "c1": 1, "c2": 2},
//     "noise_sigma": 1,
//     "seeds": [1, 2, 3],
//     "sweep": {"t_p": [1000, 2000, 3000], "nu": [], "arms": []},
//     "output_dir": "out",
//     "gap": {"grid_resolution": 1e-4, "max_log_inflation": 2.302585, "mode": "auto"},
//     "bounds": {"alpha": 0.2, "c_alpha": 1, "gamma": 1, "c_gamma": 1, "rho_depth": 5},
//     "outputs": {"step_trace": false, "tree_dump": false}
//   }
//
// Omitted keys take the defaults shown in the structs below. The policy
// delta defaults to 1/T and the policy sigma to noise_sigma.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pshift/analysis.hpp"
#include "pshift/cone.hpp"
#include "pshift/environment.hpp"
#include "pshift/error.hpp"
#include "pshift/pareto.hpp"
#include "pshift/policy.hpp"

namespace pshift {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::json;

enum class PolicyKind { algorithm1, random_baseline };

inline const char* to_string(PolicyKind k) { return k == PolicyKind::algorithm1 ? "algorithm1" : "random_baseline"; }

struct PolicyConfig {
    PolicyKind kind = PolicyKind::algorithm1;
    std::optional<double> delta;  // default 1/T
    double beta = 1.0;
    double c_beta = 1.0;
    std::optional<double> sigma;  // default noise_sigma
    double c1 = 1.0;
    double c2 = 2.0;
    std::optional<std::uint64_t> warmup_rounds;
};

struct SweepAxes {
    std::vector<std::uint64_t> change_points;
    std::vector<double> nus;
    std::vector<std::size_t> arms;

    bool empty() const { return change_points.empty() && nus.empty() && arms.empty(); }
};

struct BoundSettings {
    double alpha = 0.2;
    double c_alpha = 1.0;
    double gamma = 1.0;
    double c_gamma = 1.0;
    unsigned rho_depth = 5;
};

struct OutputSettings {
    bool step_trace = false;
    bool tree_dump = false;
};

struct RunConfig {
    Instance instance = Instance::appendix(20);
    std::vector<Phase> phases;
    Distribution target = Distribution::uniform(1);
    std::uint64_t horizon = 1;
    Cone cone = Cone::orthant(2);
    PolicyConfig policy;
    double noise_sigma = 1.0;
    std::vector<std::uint64_t> seeds;
    SweepAxes sweep;
    std::string output_dir = "out";
    GapSolverConfig gap;
    BoundSettings bounds;
    OutputSettings outputs;

    ShiftSchedule schedule() const { return ShiftSchedule(phases, target, horizon); }

    PolicyParams policy_params() const {
        PolicyParams p;
        p.arms = instance.arms();
        p.objectives = instance.objectives();
        p.delta = policy.delta.value_or(1.0 / static_cast<double>(horizon));
        p.beta = policy.beta;
        p.c_beta = policy.c_beta;
        p.sigma = policy.sigma.value_or(noise_sigma);
        p.c1 = policy.c1;
        p.c2 = policy.c2;
        p.warmup_override = policy.warmup_rounds;
        return p;
    }

    /// Cross-module checks; throws ConfigError naming the offending key.
    void validate() const;
};

// JSON <-> config ---------------------------------------------------------

namespace config_detail {

inline std::string join(const std::string& path, const std::string& key) { return path + "/" + key; }

inline const Json& require(const Json& obj, const std::string& key, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(join(path, key), "missing required key");
    return *it;
}

template <typename T>
T as(const Json& v, const std::string& path);

template <>
inline double as<double>(const Json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
    return d;
}

template <>
inline std::uint64_t as<std::uint64_t>(const Json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    }
    throw ConfigError(path, "expected a nonnegative integer");
}

inline std::size_t as_size(const Json& v, const std::string& path) {
    return static_cast<std::size_t>(as<std::uint64_t>(v, path));
}

template <>
inline bool as<bool>(const Json& v, const std::string& path) {
    if (!v.is_boolean()) throw ConfigError(path, "expected true or false");
    return v.get<bool>();
}

template <>
inline std::string as<std::string>(const Json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

template <typename T>
T get_or(const Json& obj, const std::string& key, const std::string& path, T fallback) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    return as<T>(*it, join(path, key));
}

inline void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError(join(path, it.key()), "unknown key");
    }
}

inline RewardVector vector_from(const Json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array of numbers");
    RewardVector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = as<double>(v[i], path + "/" + std::to_string(i));
    return out;
}

inline Json to_json(const RewardVector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

template <typename F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace config_detail

inline Cone cone_from_json(const Json& v, const std::string& path, std::size_t objectives) {
    using namespace config_detail;
    if (v.is_string()) {
        if (v.get<std::string>() != "orthant") throw ConfigError(path, "cone must be \"orthant\" or a generator spec");
        return Cone::orthant(objectives);
    }
    if (!v.is_object()) throw ConfigError(path, "cone must be \"orthant\" or an object");
    reject_unknown(v, {"kind", "dim", "generators"}, path);
    const auto kind = get_or<std::string>(v, "kind", path, v.contains("generators") ? "generators" : "orthant");
    if (kind == "orthant") {
        const auto dim = v.contains("dim") ? as_size(v["dim"], join(path, "dim")) : objectives;
        return wrap(path, [&] { return Cone::orthant(dim); });
    }
    if (kind != "generators") throw ConfigError(join(path, "kind"), "expected \"orthant\" or \"generators\"");
    // Row-major list of rows; column j of the matrix is generator w_j.
    const Json& rows = require(v, "generators", path);
    if (!rows.is_array() || rows.empty()) throw ConfigError(join(path, "generators"), "expected a square matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix w(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto rp = join(path, "generators/" + std::to_string(r));
        const RewardVector row = vector_from(rows[static_cast<std::size_t>(r)], rp);
        if (row.size() != n) throw ConfigError(rp, "generator matrix must be square");
        w.row(r) = row.transpose();
    }
    return wrap(join(path, "generators"), [&] { return Cone::from_generators(w); });
}

inline Json cone_to_json(const Cone& cone) {
    if (cone.is_orthant()) return Json{{"kind", "orthant"}, {"dim", cone.dim()}};
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < cone.generators().rows(); ++r) {
        rows.push_back(config_detail::to_json(cone.generators().row(r).transpose()));
    }
    return Json{{"kind", "generators"}, {"generators", rows}};
}

inline Distribution distribution_from_json(const Json& v, const std::string& path) {
    using namespace config_detail;
    if (!v.is_object()) throw ConfigError(path, "expected a distribution object");
    const auto kind = as<std::string>(require(v, "kind", path), join(path, "kind"));
    if (kind == "uniform") {
        reject_unknown(v, {"kind", "dim"}, path);
        const auto dim = v.contains("dim") ? as_size(v["dim"], join(path, "dim")) : std::size_t{1};
        return wrap(path, [&] { return Distribution::uniform(dim); });
    }
    if (kind == "power_law") {
        reject_unknown(v, {"kind", "nu"}, path);
        const double nu = as<double>(require(v, "nu", path), join(path, "nu"));
        return wrap(join(path, "nu"), [&] { return Distribution::power_law(nu); });
    }
    if (kind == "mixture") {
        reject_unknown(v, {"kind", "components"}, path);
        const Json& comps = require(v, "components", path);
        if (!comps.is_array() || comps.empty()) throw ConfigError(join(path, "components"), "expected a non-empty array");
        std::vector<double> weights;
        std::vector<Distribution> parts;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const auto cp = join(path, "components/" + std::to_string(i));
            weights.push_back(as<double>(require(comps[i], "weight", cp), join(cp, "weight")));
            parts.push_back(distribution_from_json(require(comps[i], "distribution", cp), join(cp, "distribution")));
        }
        return wrap(path, [&] { return Distribution::mixture(weights, parts); });
    }
    throw ConfigError(join(path, "kind"), "unknown distribution kind \"" + kind + "\"");
}

inline Json distribution_to_json(const Distribution& d) {
    switch (d.kind()) {
        case DistributionKind::uniform: return Json{{"kind", "uniform"}, {"dim", d.dim()}};
        case DistributionKind::power_law: return Json{{"kind", "power_law"}, {"nu", d.nu()}};
        case DistributionKind::mixture: {
            Json comps = Json::array();
            for (std::size_t i = 0; i < d.weights().size(); ++i) {
                comps.push_back(Json{{"weight", d.weights()[i]}, {"distribution", distribution_to_json(d.components()[i])}});
            }
            return Json{{"kind", "mixture"}, {"components", comps}};
        }
    }
    return {};
}

inline Instance instance_from_json(const Json& v, const std::string& path) {
    using namespace config_detail;
    if (!v.is_object()) throw ConfigError(path, "expected an instance object");
    const auto kind = as<std::string>(require(v, "kind", path), join(path, "kind"));
    if (kind == "appendix_biobjective") {
        reject_unknown(v, {"kind", "arms"}, path);
        const auto arms = as_size(require(v, "arms", path), join(path, "arms"));
        return wrap(join(path, "arms"), [&] { return Instance::appendix(arms); });
    }
    if (kind == "table_fixed") {
        reject_unknown(v, {"kind", "means", "labels", "context_dim"}, path);
        const Json& means = require(v, "means", path);
        if (!means.is_array() || means.empty()) throw ConfigError(join(path, "means"), "expected a non-empty array");
        ArmMeanTable table;
        for (std::size_t k = 0; k < means.size(); ++k) {
            table.means.push_back(vector_from(means[k], join(path, "means/" + std::to_string(k))));
        }
        if (v.contains("labels")) {
            const Json& labels = v["labels"];
            if (!labels.is_array()) throw ConfigError(join(path, "labels"), "expected an array of strings");
            for (std::size_t k = 0; k < labels.size(); ++k) {
                table.labels.push_back(as<std::string>(labels[k], join(path, "labels/" + std::to_string(k))));
            }
        } else {
            for (std::size_t k = 0; k < table.means.size(); ++k) table.labels.push_back("A" + std::to_string(k));
        }
        const auto dim = v.contains("context_dim") ? as_size(v["context_dim"], join(path, "context_dim")) : std::size_t{1};
        return wrap(path, [&] { return Instance::table_fixed(std::move(table), dim); });
    }
    if (kind == "holder_mixture") {
        reject_unknown(v, {"kind", "beta", "context_dim", "arms"}, path);
        HolderMixture mix;
        mix.beta = get_or<double>(v, "beta", path, 1.0);
        mix.context_dim = v.contains("context_dim") ? as_size(v["context_dim"], join(path, "context_dim")) : std::size_t{1};
        const Json& arms = require(v, "arms", path);
        if (!arms.is_array() || arms.empty()) throw ConfigError(join(path, "arms"), "expected a non-empty array");
        for (std::size_t k = 0; k < arms.size(); ++k) {
            const auto ap = join(path, "arms/" + std::to_string(k));
            HolderArm arm;
            arm.offset = vector_from(require(arms[k], "offset", ap), join(ap, "offset"));
            if (arms[k].contains("bumps")) {
                const Json& bumps = arms[k]["bumps"];
                if (!bumps.is_array()) throw ConfigError(join(ap, "bumps"), "expected an array");
                for (std::size_t b = 0; b < bumps.size(); ++b) {
                    const auto bp = join(ap, "bumps/" + std::to_string(b));
                    HolderBump bump;
                    bump.center = vector_from(require(bumps[b], "center", bp), join(bp, "center"));
                    bump.radius = as<double>(require(bumps[b], "radius", bp), join(bp, "radius"));
                    bump.amplitude = vector_from(require(bumps[b], "amplitude", bp), join(bp, "amplitude"));
                    arm.bumps.push_back(std::move(bump));
                }
            }
            mix.arms.push_back(std::move(arm));
        }
        return wrap(path, [&] { return Instance(std::move(mix)); });
    }
    throw ConfigError(join(path, "kind"), "unknown instance kind \"" + kind + "\"");
}

inline Json instance_to_json(const Instance& inst) {
    using config_detail::to_json;
    return std::visit([](const auto& m) -> Json {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, AppendixBiobjective>) {
            return Json{{"kind", "appendix_biobjective"}, {"arms", m.arms}};
        } else if constexpr (std::is_same_v<T, TableFixed>) {
            Json means = Json::array();
            for (const auto& mu : m.table.means) means.push_back(to_json(mu));
            return Json{{"kind", "table_fixed"}, {"means", means}, {"labels", m.table.labels}, {"context_dim", m.context_dim}};
        } else {
            Json arms = Json::array();
            for (const auto& arm : m.arms) {
                Json bumps = Json::array();
                for (const auto& b : arm.bumps) {
                    bumps.push_back(Json{{"center", to_json(b.center)}, {"radius", b.radius}, {"amplitude", to_json(b.amplitude)}});
                }
                arms.push_back(Json{{"offset", to_json(arm.offset)}, {"bumps", bumps}});
            }
            return Json{{"kind", "holder_mixture"}, {"beta", m.beta}, {"context_dim", m.context_dim}, {"arms", arms}};
        }
    }, inst.model());
}

inline GapMode gap_mode_from(const std::string& s, const std::string& path) {
    if (s == "auto") return GapMode::automatic;
    if (s == "orthant_closed_form") return GapMode::orthant_closed_form;
    if (s == "grid_oracle") return GapMode::grid_oracle;
    throw ConfigError(path, "gap mode must be auto, orthant_closed_form or grid_oracle");
}

inline const char* to_string(GapMode m) {
    switch (m) {
        case GapMode::automatic: return "auto";
        case GapMode::orthant_closed_form: return "orthant_closed_form";
        case GapMode::grid_oracle: return "grid_oracle";
    }
    return "auto";
}

inline RunConfig config_from_json(const Json& doc) {
    using namespace config_detail;
    const std::string root;
    if (!doc.is_object()) throw ConfigError("/", "config must be a JSON object");
    reject_unknown(doc, {"schema_version", "instance", "schedule", "cone", "policy", "noise_sigma", "seeds", "sweep",
                         "output_dir", "gap", "bounds", "outputs"}, root);
    const auto version = as<std::uint64_t>(require(doc, "schema_version", root), "/schema_version");
    if (version != kSchemaVersion) throw ConfigError("/schema_version", "unsupported schema version " + std::to_string(version));

    RunConfig cfg;
    cfg.instance = instance_from_json(require(doc, "instance", root), "/instance");

    const Json& sched = require(doc, "schedule", root);
    if (!sched.is_object()) throw ConfigError("/schedule", "expected an object");
    reject_unknown(sched, {"phases", "target", "horizon"}, "/schedule");
    if (sched.contains("phases")) {
        const Json& phases = sched["phases"];
        if (!phases.is_array()) throw ConfigError("/schedule/phases", "expected an array");
        for (std::size_t j = 0; j < phases.size(); ++j) {
            const auto pp = "/schedule/phases/" + std::to_string(j);
            reject_unknown(phases[j], {"distribution", "duration"}, pp);
            Phase phase{distribution_from_json(require(phases[j], "distribution", pp), pp + "/distribution"),
                        as<std::uint64_t>(require(phases[j], "duration", pp), pp + "/duration")};
            if (phase.duration == 0) throw ConfigError(pp + "/duration", "must be >= 1");
            cfg.phases.push_back(std::move(phase));
        }
    }
    cfg.target = distribution_from_json(require(sched, "target", "/schedule"), "/schedule/target");
    cfg.horizon = as<std::uint64_t>(require(sched, "horizon", "/schedule"), "/schedule/horizon");

    cfg.cone = doc.contains("cone") ? cone_from_json(doc["cone"], "/cone", cfg.instance.objectives())
                                    : Cone::orthant(cfg.instance.objectives());

    if (doc.contains("policy")) {
        const Json& p = doc["policy"];
        if (!p.is_object()) throw ConfigError("/policy", "expected an object");
        reject_unknown(p, {"kind", "delta", "beta", "c_beta", "sigma", "c1", "c2", "warmup_rounds"}, "/policy");
        const auto kind = get_or<std::string>(p, "kind", "/policy", "algorithm1");
        if (kind == "algorithm1") cfg.policy.kind = PolicyKind::algorithm1;
        else if (kind == "random_baseline") cfg.policy.kind = PolicyKind::random_baseline;
        else throw ConfigError("/policy/kind", "expected algorithm1 or random_baseline");
        if (p.contains("delta") && !p["delta"].is_null()) cfg.policy.delta = as<double>(p["delta"], "/policy/delta");
        cfg.policy.beta = get_or<double>(p, "beta", "/policy", 1.0);
        cfg.policy.c_beta = get_or<double>(p, "c_beta", "/policy", 1.0);
        if (p.contains("sigma") && !p["sigma"].is_null()) cfg.policy.sigma = as<double>(p["sigma"], "/policy/sigma");
        cfg.policy.c1 = get_or<double>(p, "c1", "/policy", 1.0);
        cfg.policy.c2 = get_or<double>(p, "c2", "/policy", 2.0);
        if (p.contains("warmup_rounds") && !p["warmup_rounds"].is_null()) {
            cfg.policy.warmup_rounds = as<std::uint64_t>(p["warmup_rounds"], "/policy/warmup_rounds");
        }
    }
    cfg.noise_sigma = get_or<double>(doc, "noise_sigma", root, 1.0);

    const Json& seeds = require(doc, "seeds", root);
    if (!seeds.is_array() || seeds.empty()) throw ConfigError("/seeds", "expected a non-empty array of integers");
    for (std::size_t i = 0; i < seeds.size(); ++i) cfg.seeds.push_back(as<std::uint64_t>(seeds[i], "/seeds/" + std::to_string(i)));

    if (doc.contains("sweep")) {
        const Json& s = doc["sweep"];
        if (!s.is_object()) throw ConfigError("/sweep", "expected an object");
        reject_unknown(s, {"t_p", "nu", "arms"}, "/sweep");
        auto list = [&](const char* key, auto&& push) {
            if (!s.contains(key)) return;
            const Json& a = s[key];
            if (!a.is_array()) throw ConfigError(std::string("/sweep/") + key, "expected an array");
            for (std::size_t i = 0; i < a.size(); ++i) push(a[i], std::string("/sweep/") + key + "/" + std::to_string(i));
        };
        list("t_p", [&](const Json& v, const std::string& p) { cfg.sweep.change_points.push_back(as<std::uint64_t>(v, p)); });
        list("nu", [&](const Json& v, const std::string& p) { cfg.sweep.nus.push_back(as<double>(v, p)); });
        list("arms", [&](const Json& v, const std::string& p) { cfg.sweep.arms.push_back(as_size(v, p)); });
    }

    cfg.output_dir = get_or<std::string>(doc, "output_dir", root, "out");

    if (doc.contains("gap")) {
        const Json& g = doc["gap"];
        reject_unknown(g, {"grid_resolution", "max_log_inflation", "mode"}, "/gap");
        cfg.gap.grid_resolution = get_or<double>(g, "grid_resolution", "/gap", cfg.gap.grid_resolution);
        cfg.gap.max_log_inflation = get_or<double>(g, "max_log_inflation", "/gap", cfg.gap.max_log_inflation);
        cfg.gap.mode = gap_mode_from(get_or<std::string>(g, "mode", "/gap", "auto"), "/gap/mode");
    }
    if (doc.contains("bounds")) {
        const Json& b = doc["bounds"];
        reject_unknown(b, {"alpha", "c_alpha", "gamma", "c_gamma", "rho_depth"}, "/bounds");
        cfg.bounds.alpha = get_or<double>(b, "alpha", "/bounds", cfg.bounds.alpha);
        cfg.bounds.c_alpha = get_or<double>(b, "c_alpha", "/bounds", cfg.bounds.c_alpha);
        cfg.bounds.gamma = get_or<double>(b, "gamma", "/bounds", cfg.bounds.gamma);
        cfg.bounds.c_gamma = get_or<double>(b, "c_gamma", "/bounds", cfg.bounds.c_gamma);
        cfg.bounds.rho_depth = static_cast<unsigned>(get_or<std::uint64_t>(b, "rho_depth", "/bounds", cfg.bounds.rho_depth));
    }
    if (doc.contains("outputs")) {
        const Json& o = doc["outputs"];
        reject_unknown(o, {"step_trace", "tree_dump"}, "/outputs");
        cfg.outputs.step_trace = get_or<bool>(o, "step_trace", "/outputs", false);
        cfg.outputs.tree_dump = get_or<bool>(o, "tree_dump", "/outputs", false);
    }
    cfg.validate();
    return cfg;
}

inline Json config_to_json(const RunConfig& cfg) {
    Json phases = Json::array();
    for (const auto& p : cfg.phases) phases.push_back(Json{{"distribution", distribution_to_json(p.distribution)}, {"duration", p.duration}});
    Json policy{{"kind", to_string(cfg.policy.kind)},
                {"beta", cfg.policy.beta},
                {"c_beta", cfg.policy.c_beta},
                {"c1", cfg.policy.c1},
                {"c2", cfg.policy.c2}};
    policy["delta"] = cfg.policy.delta ? Json(*cfg.policy.delta) : Json(nullptr);
    policy["sigma"] = cfg.policy.sigma ? Json(*cfg.policy.sigma) : Json(nullptr);
    policy["warmup_rounds"] = cfg.policy.warmup_rounds ? Json(*cfg.policy.warmup_rounds) : Json(nullptr);
    return Json{
        {"schema_version", kSchemaVersion},
        {"instance", instance_to_json(cfg.instance)},
        {"schedule", Json{{"phases", phases}, {"target", distribution_to_json(cfg.target)}, {"horizon", cfg.horizon}}},
        {"cone", cone_to_json(cfg.cone)},
        {"policy", policy},
        {"noise_sigma", cfg.noise_sigma},
        {"seeds", cfg.seeds},
        {"sweep", Json{{"t_p", cfg.sweep.change_points}, {"nu", cfg.sweep.nus}, {"arms", cfg.sweep.arms}}},
        {"output_dir", cfg.output_dir},
        {"gap", Json{{"grid_resolution", cfg.gap.grid_resolution}, {"max_log_inflation", cfg.gap.max_log_inflation}, {"mode", to_string(cfg.gap.mode)}}},
        {"bounds", Json{{"alpha", cfg.bounds.alpha}, {"c_alpha", cfg.bounds.c_alpha}, {"gamma", cfg.bounds.gamma},
                        {"c_gamma", cfg.bounds.c_gamma}, {"rho_depth", cfg.bounds.rho_depth}}},
        {"outputs", Json{{"step_trace", cfg.outputs.step_trace}, {"tree_dump", cfg.outputs.tree_dump}}},
    };
}

inline void RunConfig::validate() const {
    if (seeds.empty()) throw ConfigError("/seeds", "at least one seed is required");
    if (instance.context_dim() != target.dim()) throw ConfigError("/schedule/target", "dimension differs from the instance context dimension");
    config_detail::wrap("/schedule", [&] { return schedule(); });
    if (cone.dim() != instance.objectives()) throw ConfigError("/cone", "cone dimension differs from the number of objectives");
    if (!(noise_sigma >= 0.0)) throw ConfigError("/noise_sigma", "must be >= 0");
    config_detail::wrap("/gap", [&] { gap.validate(); return 0; });
    config_detail::wrap("/policy", [&] { policy_params().validate(); return 0; });
    if (!(bounds.alpha > 0.0)) throw ConfigError("/bounds/alpha", "must be positive");
    if (!(bounds.gamma > 0.0)) throw ConfigError("/bounds/gamma", "must be positive");
    if (bounds.rho_depth * target.dim() > 20) throw ConfigError("/bounds/rho_depth", "too deep for cell enumeration");
    for (std::size_t i = 0; i < sweep.change_points.size(); ++i) {
        if (phases.size() != 1) throw ConfigError("/sweep/t_p", "sweeping t_p needs exactly one source phase");
        if (sweep.change_points[i] == 0 || sweep.change_points[i] > horizon) {
            throw ConfigError("/sweep/t_p/" + std::to_string(i), "must lie in [1, horizon]");
        }
    }
    if (!sweep.nus.empty()) {
        bool any = false;
        for (const auto& p : phases) any = any || p.distribution.kind() == DistributionKind::power_law;
        if (!any) throw ConfigError("/sweep/nu", "no power-law source phase to sweep");
        for (std::size_t i = 0; i < sweep.nus.size(); ++i) {
            if (!(sweep.nus[i] > -1.0)) throw ConfigError("/sweep/nu/" + std::to_string(i), "must exceed -1");
        }
    }
    if (!sweep.arms.empty()) {
        if (!std::holds_alternative<AppendixBiobjective>(instance.model())) {
            throw ConfigError("/sweep/arms", "sweeping K needs the appendix_biobjective instance");
        }
        for (std::size_t i = 0; i < sweep.arms.size(); ++i) {
            if (sweep.arms[i] == 0) throw ConfigError("/sweep/arms/" + std::to_string(i), "must be >= 1");
        }
    }
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
    }
    return config_from_json(doc);
}

/// FNV-1a 64 of the canonical JSON form, as 16 hex digits.
inline std::string content_hash(const Json& doc) {
    const std::string text = doc.dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream out;
    out << std::hex;
    out.width(16);
    out.fill('0');
    out << h;
    return out.str();
}

}  // namespace pshift
