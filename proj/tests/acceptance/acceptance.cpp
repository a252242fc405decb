// Acceptance checks. One PASS/FAIL line per criterion; exits nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pshift/pshift.hpp"

using namespace pshift;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::printf("criterion %d: %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Cone c3_cone() {
    Matrix w(2, 2);
    w << 1.0, 0.6, 0.6, 1.0;
    return Cone::from_generators(w);
}

RunConfig load(const std::string& name) {
    return load_config(std::string(PSHIFT_SOURCE_DIR) + "/configs/" + name);
}

RunOptions run_options() {
    RunOptions o;
    o.jobs = std::max(1u, std::thread::hardware_concurrency());
    return o;
}

// Shared with criterion 8.
std::uint64_t runtime_violations = 0;
std::size_t partition_failures = 0;
std::size_t audited_runs = 0;

void audit(const SeedRun& run) {
    ++audited_runs;
    runtime_violations += run.checks.total();
    if (!run.partition.ok()) ++partition_failures;
}

// 1 and 2 -----------------------------------------------------------------

void gap_table_and_pareto_sets() {
    const auto start = Clock::now();
    const ArmMeanTable table = read_arm_table(std::string(PSHIFT_SOURCE_DIR) + "/configs/appendix_arms.csv");
    const std::vector<Cone> cones{Cone::orthant(2), c3_cone()};
    GapSolverConfig cfg;
    cfg.grid_resolution = 1e-4;

    const std::vector<std::vector<std::size_t>> expected_fronts{{5, 6, 8, 9}, {1, 2, 4, 5, 6, 8, 9}};
    // Printed values; everything not listed is 0.
    std::vector<std::map<std::size_t, double>> printed(2);
    printed[0] = {{0, 0.1719}, {1, 0.1542}, {2, 0.0870}, {3, 0.2231}, {4, 0.0488}, {7, 0.3054}};
    printed[1] = {{3, 0.0392}, {7, 0.0556}};

    bool flags_ok = true;
    double worst = 0.0;
    std::vector<std::vector<std::size_t>> fronts;
    for (std::size_t c = 0; c < cones.size(); ++c) {
        fronts.push_back(pareto_set(table, cones[c]));
        flags_ok = flags_ok && fronts.back() == expected_fronts[c];
        for (std::size_t k = 0; k < table.size(); ++k) {
            const double want = printed[c].count(k) ? printed[c].at(k) : 0.0;
            const double got = gap(k, fronts.back(), table, cones[c], cfg);
            worst = std::max(worst, std::abs(got - want));
        }
    }
    const double elapsed = seconds_since(start);
    report(1, flags_ok && worst <= 2e-3 && elapsed < 5.0,
           fmt("flags %s, max |delta - printed| = %.5f (tol 2e-3), %.2f s (limit 5 s)", flags_ok ? "exact" : "differ",
               worst, elapsed));

    bool sets_ok = fronts[0] == expected_fronts[0] && fronts[1] == expected_fronts[1];
    auto show = [&](const std::vector<std::size_t>& f) {
        std::string s = "{";
        for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + table.labels[f[i]];
        return s + "}";
    };
    report(2, sets_ok, "orthant " + show(fronts[0]) + ", C3 " + show(fronts[1]));
}

// 3 -----------------------------------------------------------------------

void metric_axioms() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20261019);
    std::uniform_real_distribution<double> comp(0.1, 10.0);
    std::uniform_int_distribution<int> size(1, 4);
    const double slack = 4.0 * GapSolverConfig{}.grid_resolution;

    auto random_front = [&](std::size_t m, const Cone& cone) {
        std::vector<RewardVector> pts(static_cast<std::size_t>(size(rng)));
        for (auto& p : pts) {
            p.resize(static_cast<Eigen::Index>(m));
            for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = comp(rng);
        }
        std::vector<RewardVector> front;
        for (auto k : pareto_set(std::span<const RewardVector>(pts), cone)) front.push_back(pts[k]);
        return front;
    };

    std::size_t nonneg = 0, symmetry = 0, identity = 0, triangle = 0;
    double worst_excess = 0.0;
    const int triples = 1000;
    for (int i = 0; i < triples; ++i) {
        const std::size_t m = i % 2 == 0 ? 2 : 3;
        const Cone cone = Cone::orthant(m);
        const auto a = random_front(m, cone), b = random_front(m, cone), c = random_front(m, cone);
        const double ab = pref_distance(a, b, cone), ba = pref_distance(b, a, cone);
        const double bc = pref_distance(b, c, cone), ac = pref_distance(a, c, cone);
        if (ab < 0.0 || bc < 0.0 || ac < 0.0) ++nonneg;
        if (std::abs(ab - ba) > slack) ++symmetry;
        if (pref_distance(a, a, cone) > slack) ++identity;
        const double excess = ac - (ab + bc);
        if (excess > slack) ++triangle;
        worst_excess = std::max(worst_excess, excess);
    }
    const double elapsed = seconds_since(start);
    const bool pass = nonneg == 0 && symmetry == 0 && identity == 0 && triangle == 0 && elapsed < 60.0;
    report(3, pass,
           fmt("violations over %d triples: nonnegativity %zu, symmetry %zu, identity %zu, triangle %zu "
               "(worst excess %.4f, slack %.0e), %.2f s",
               triples, nonneg, symmetry, identity, triangle, worst_excess, slack, elapsed));
}

// 4 -----------------------------------------------------------------------

void order_properties() {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    const double tol = 1e-9;

    Matrix w3(3, 3);
    w3 << 1.0, 0.3, 0.1, 0.2, 1.0, 0.4, 0.1, 0.2, 1.0;
    const std::vector<std::pair<std::string, Cone>> cones{
        {"orthant2", Cone::orthant(2)}, {"C3", c3_cone()}, {"orthant3", Cone::orthant(3)}, {"simplicial3", Cone::from_generators(w3)}};

    std::size_t bad = 0, transitive_checked = 0;
    for (const auto& [name, cone] : cones) {
        const auto m = static_cast<Eigen::Index>(cone.dim());
        auto random_vec = [&] {
            RewardVector v(m);
            for (Eigen::Index i = 0; i < m; ++i) v(i) = normal(rng);
            return v;
        };
        auto cone_vec = [&] {
            RewardVector lambda(m);
            for (Eigen::Index i = 0; i < m; ++i) lambda(i) = weight(rng);
            return RewardVector(cone.generators() * lambda);
        };
        for (int i = 0; i < 10000; ++i) {
            const RewardVector x = random_vec();
            if (!cone.weakly_dominates(x, x)) ++bad;
            if (cone.strictly_dominates(x, x) || cone.dominates(x, x)) ++bad;

            // Chains built inside the cone plus unconstrained triples.
            const RewardVector y = x + cone_vec();
            const RewardVector z = y + cone_vec();
            if (!cone.weakly_dominates(y, x) || !cone.weakly_dominates(z, y) || !cone.weakly_dominates(z, x)) ++bad;
            const RewardVector p = random_vec(), q = random_vec();
            if (cone.weakly_dominates(p, x) && cone.weakly_dominates(q, p)) {
                ++transitive_checked;
                if (!cone.weakly_dominates(q, x)) ++bad;
            }
            if (cone.strictly_dominates(p, x) && cone.strictly_dominates(x, p)) ++bad;

            // Both representations agree away from the boundary.
            const RewardVector v = random_vec();
            const RewardVector normals_v = cone.halfspace_normals() * v;
            if (normals_v.cwiseAbs().minCoeff() > tol && cone.contains(v) != cone.generator_contains(v, tol)) ++bad;
            if (!cone.generator_contains(cone_vec(), tol) || !cone.contains(cone_vec())) ++bad;
        }
    }
    report(4, bad == 0,
           fmt("%zu violations over 4 cones x 1e4 vectors (tol 1e-9); %zu random transitivity chains", bad,
               transitive_checked));
}

// 5 -----------------------------------------------------------------------

void dissimilarity_checks() {
    bool self_ok = true;
    for (unsigned h = 0; h <= 10; ++h) {
        self_ok = self_ok && dissimilarity(Distribution::uniform(), Distribution::uniform(), h).value == std::ldexp(1.0, static_cast<int>(h));
    }
    const double closed = dissimilarity(Distribution::power_law(1.0), Distribution::uniform(), 1).value;
    Rng rng = derive_stream(5, "acceptance");
    const double mc = dissimilarity_monte_carlo(Distribution::power_law(1.0), Distribution::uniform(), 1, 1000000, rng).value;
    const double closed_err = std::abs(closed - 8.0 / 3.0);
    const double mc_rel = std::abs(mc / (8.0 / 3.0) - 1.0);
    report(5, self_ok && closed_err <= 1e-9 && mc_rel <= 0.02,
           fmt("rho_h(Q,Q) = 2^h for h<=10: %s; closed form err %.1e (tol 1e-9); MC %.5f rel err %.4f (tol 0.02)",
               self_ok ? "yes" : "no", closed_err, mc, mc_rel));
}

// 6 -----------------------------------------------------------------------

double window_mean_over_seeds(const RunResult& r, double from_fraction, double to_fraction) {
    double total = 0.0;
    for (const auto& run : r.seeds) {
        const auto n = run.trace.size();
        const auto begin = static_cast<std::size_t>(std::floor(from_fraction * static_cast<double>(n)));
        const auto end = static_cast<std::size_t>(std::floor(to_fraction * static_cast<double>(n)));
        total += run.trace.window_mean(begin, end);
    }
    return total / static_cast<double>(r.seeds.size());
}

void regret_study(const fs::path& out) {
    const auto start = Clock::now();
    RunConfig base = load("changepoint_sweep.json");
    base.output_dir = (out / "changepoint").string();
    const auto cells = sweep(base, run_options());

    RunConfig baseline = load("random_baseline.json");
    baseline.output_dir = (out / "baseline").string();
    const RunResult random = run_experiment(baseline, run_options());

    std::vector<double> means, stds;
    const RunResult* at_2000 = nullptr;
    std::string cell_errors;
    for (const auto& c : cells) {
        if (!c.ok()) {
            cell_errors += " t_p=" + std::to_string(c.change_point) + ": " + c.error;
            continue;
        }
        for (const auto& run : c.result->seeds) audit(run);
        means.push_back(c.result->summary.mean);
        stds.push_back(c.result->summary.std);
        if (c.change_point == 2000) at_2000 = &*c.result;
    }
    const double elapsed = seconds_since(start);
    if (!cell_errors.empty() || at_2000 == nullptr || means.size() != 3) {
        report(6, false, "sweep cells failed:" + cell_errors);
        return;
    }

    const bool a = at_2000->summary.mean <= 0.5 * random.summary.mean;

    int inversions = 0;
    bool inversions_small = true;
    for (std::size_t i = 0; i + 1 < means.size(); ++i) {
        if (means[i + 1] > means[i]) {
            ++inversions;
            const double pooled = std::sqrt(0.5 * (stds[i] * stds[i] + stds[i + 1] * stds[i + 1]));
            inversions_small = inversions_small && means[i + 1] - means[i] <= pooled;
        }
    }
    const bool b = inversions == 0 || (inversions == 1 && inversions_small);

    const double early = window_mean_over_seeds(*at_2000, 0.0, 0.1);
    const double late = window_mean_over_seeds(*at_2000, 0.9, 1.0);
    const bool c = late < early;

    report(6, a && b && c && elapsed < 600.0,
           fmt("(a) %s: alg %.1f vs baseline %.1f at t_p=2000; (b) %s: t_p 1000/2000/3000 -> %.1f/%.1f/%.1f, %d inversions; "
               "(c) %s: first-10%% %.4f vs last-10%% %.4f per round; %.0f s (limit 600 s)",
               a ? "ok" : "fail", at_2000->summary.mean, random.summary.mean, b ? "ok" : "fail", means[0], means[1],
               means[2], inversions, c ? "ok" : "fail", early, late, elapsed));
}

// 7 -----------------------------------------------------------------------

void zero_noise() {
    RunConfig cfg = load("zero_noise_table.json");
    const std::uint64_t seed = cfg.seeds.front();
    const std::uint64_t change_point = cfg.schedule().change_point();

    // Last round at which any bin's active set differs from its previous visit.
    std::map<std::pair<unsigned, std::uint64_t>, std::vector<std::size_t>> last_seen;
    std::uint64_t settled_after = 0;
    const SeedRun run = simulate(cfg, seed, [&](std::uint64_t t, const StepRecord& rec) {
        if (rec.warmup) {
            settled_after = t;
            return;
        }
        auto& seen = last_seen[{rec.bin.depth, rec.bin.index}];
        if (seen != rec.active_set) {
            seen = rec.active_set;
            settled_after = t;
        }
    });
    audit(run);

    std::uint64_t nonzero_after = 0;
    std::uint64_t positive_before = 0;
    for (std::size_t i = 0; i < run.trace.size(); ++i) {
        if (run.trace.rounds[i] <= settled_after && run.trace.instant[i] > 0.0) ++positive_before;
        if (run.trace.rounds[i] > settled_after && run.trace.instant[i] != 0.0) ++nonzero_after;
    }
    const bool reached = settled_after < cfg.horizon && run.trace.instant.back() == 0.0;
    report(7, run.oracle_eliminations == 0 && reached && nonzero_after == 0,
           fmt("oracle-arm eliminations %llu; active sets settled after round %llu of %llu (t_p=%llu); "
               "target-phase rounds with positive regret before settling: %llu; nonzero regret after settling: %llu",
               static_cast<unsigned long long>(run.oracle_eliminations), static_cast<unsigned long long>(settled_after),
               static_cast<unsigned long long>(cfg.horizon), static_cast<unsigned long long>(change_point),
               static_cast<unsigned long long>(positive_before), static_cast<unsigned long long>(nonzero_after)));
}

// 8 -----------------------------------------------------------------------

void runtime_invariants() {
    report(8, audited_runs > 0 && runtime_violations == 0 && partition_failures == 0,
           fmt("%zu runs audited: %llu step-time violations, %zu partition failures", audited_runs,
               static_cast<unsigned long long>(runtime_violations), partition_failures));
}

// 9 -----------------------------------------------------------------------

void bound_identities() {
    BoundParams p;
    p.alpha = 0.2;
    p.beta = 1.0;
    p.arms = 20;
    p.objectives = 2;
    p.delta = 1e-4;
    p.horizon = 20000;
    p.change_point = 2000;
    p.rho_qq = 32;

    const ShiftSchedule one({{Distribution::power_law(2), 2000}}, Distribution::uniform(), 20000);
    p.rho_pq = dissimilarity(Distribution::power_law(2), Distribution::uniform(), 5).value;
    const bool single = bound_multiple_shift(p, one, 5) == bound_single_shift(p);

    BoundParams z = p;
    z.change_point = 0;
    const bool zero_tp = bound_single_shift(z) == bound_no_shift(z);
    // Independent evaluation of the problem-parameter expression.
    const double L = 20.0 * std::log(40.0 / 1e-4);
    const double direct = std::pow(L / 20000.0, 1.2) + std::pow(L * 32.0 / 20000.0, 6.0 * 2.0);
    const double rel = std::abs(bound_no_shift(z) / direct - 1.0);

    report(9, single && zero_tp && rel <= 1e-12,
           fmt("one-phase multiple == single bit-exact: %s; t_p=0 single == problem-parameter form bit-exact: %s; "
               "independent evaluation rel err %.1e (tol 1e-12)",
               single ? "yes" : "no", zero_tp ? "yes" : "no", rel));
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    fs::create_directories(out);

    gap_table_and_pareto_sets();
    metric_axioms();
    order_properties();
    dissimilarity_checks();
    regret_study(out);
    zero_noise();
    runtime_invariants();
    bound_identities();

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
