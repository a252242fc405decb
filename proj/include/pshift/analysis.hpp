#pragma once

// Regret bookkeeping, source/target dissimilarity on tree cells, and
// closed-form evaluation of the regret bounds (unit constants).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pshift/cone.hpp"
#include "pshift/environment.hpp"
#include "pshift/error.hpp"
#include "pshift/pareto.hpp"
#include "pshift/partition.hpp"

namespace pshift {

// Regret ------------------------------------------------------------------

inline double instant_regret(std::span<const RewardVector> policy_front, std::span<const RewardVector> oracle_front,
                             const Cone& cone, const GapSolverConfig& cfg = {}) {
    return pref_distance(policy_front, oracle_front, cone, cfg);
}

/// True means (floored) of the mutually non-dominated arms among `support`.
inline std::vector<RewardVector> policy_front_means(std::span<const RewardVector> true_means,
                                                    std::span<const std::size_t> support, const Cone& cone) {
    std::vector<RewardVector> out;
    for (auto k : pareto_subset(true_means, support, cone)) out.push_back(clamp_to_floor(true_means[k]));
    return out;
}

struct RegretTrace {
    std::vector<std::uint64_t> rounds;  // 1-based, all > t_p
    std::vector<double> instant;
    std::vector<double> cumulative;
    std::uint64_t seed = 0;
    std::string config_hash;

    void push(std::uint64_t round, double value) {
        if (!(value >= 0.0)) throw DomainError("instantaneous regret must be nonnegative");
        rounds.push_back(round);
        instant.push_back(value);
        cumulative.push_back((cumulative.empty() ? 0.0 : cumulative.back()) + value);
    }

    std::size_t size() const noexcept { return instant.size(); }
    double total() const noexcept { return cumulative.empty() ? 0.0 : cumulative.back(); }

    /// Mean instantaneous regret over [begin, end).
    double window_mean(std::size_t begin, std::size_t end) const {
        if (begin >= end || end > instant.size()) throw DomainError("invalid regret window");
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += instant[i];
        return s / static_cast<double>(end - begin);
    }
};

// Dissimilarity -----------------------------------------------------------

struct Dissimilarity {
    double value = 0.0;
    bool unbounded = false;
};

/// rho_h(P, Q) = sum over depth-h cells B with Q(B) > 0 of Q(B) / P(B).
/// Unbounded when some cell has Q(B) > 0 but P(B) = 0.
inline Dissimilarity dissimilarity(const Distribution& source, const Distribution& target, unsigned depth) {
    if (source.dim() != target.dim()) throw DomainError("source and target dimensions differ");
    const std::size_t dim = target.dim();
    if (static_cast<std::size_t>(depth) * dim > 24) throw DomainError("dissimilarity depth too large");
    const std::uint64_t cells = std::uint64_t{1} << (depth * dim);
    Dissimilarity out;
    for (std::uint64_t i = 0; i < cells; ++i) {
        const Box box = cell_of({depth, i}, dim);
        const double q = target.cell_mass(box);
        if (!(q > 0.0)) continue;
        const double p = source.cell_mass(box);
        if (!(p > 0.0)) {
            out.unbounded = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        out.value += q / p;
    }
    return out;
}

/// Same quantity with cell masses estimated from samples of each
/// distribution. Independent of the closed-form cell masses.
inline Dissimilarity dissimilarity_monte_carlo(const Distribution& source, const Distribution& target, unsigned depth,
                                               std::size_t samples, Rng& rng) {
    if (source.dim() != target.dim()) throw DomainError("source and target dimensions differ");
    if (samples == 0) throw DomainError("need at least one sample");
    const std::size_t dim = target.dim();
    if (static_cast<std::size_t>(depth) * dim > 24) throw DomainError("dissimilarity depth too large");
    const std::uint64_t cells = std::uint64_t{1} << (depth * dim);
    auto cell_index = [&](const Context& x) {
        std::uint64_t idx = 0;
        const double per_axis = std::ldexp(1.0, static_cast<int>(depth));
        for (unsigned level = 0; level < depth; ++level) {
            std::uint64_t digit = 0;
            for (std::size_t a = 0; a < dim; ++a) {
                const double scaled = std::min(std::floor(x(static_cast<Eigen::Index>(a)) * per_axis), per_axis - 1.0);
                const auto bits = static_cast<std::uint64_t>(scaled);
                if ((bits >> (depth - 1 - level)) & 1U) digit |= std::uint64_t{1} << a;
            }
            idx = (idx << dim) | digit;
        }
        return idx;
    };
    std::vector<double> p(cells, 0.0), q(cells, 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
        p[cell_index(source.sample(rng))] += 1.0;
        q[cell_index(target.sample(rng))] += 1.0;
    }
    Dissimilarity out;
    for (std::uint64_t i = 0; i < cells; ++i) {
        if (q[i] == 0.0) continue;
        if (p[i] == 0.0) {
            out.unbounded = true;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        out.value += q[i] / p[i];
    }
    return out;
}

/// Mixture of the source phases weighted by their durations.
inline Distribution effective_mixture(const ShiftSchedule& schedule) {
    const auto& phases = schedule.phases();
    if (phases.empty() || schedule.change_point() == 0) throw DomainError("schedule has no source phase");
    if (phases.size() == 1) return phases.front().distribution;
    const double total = static_cast<double>(schedule.change_point());
    std::vector<double> weights;
    std::vector<Distribution> components;
    for (const auto& p : phases) {
        weights.push_back(static_cast<double>(p.duration) / total);
        components.push_back(p.distribution);
    }
    return Distribution::mixture(std::move(weights), std::move(components));
}

// Regret bounds -----------------------------------------------------------

struct BoundParams {
    double alpha = 0.2;
    double c_alpha = 1.0;
    double beta = 1.0;
    double c_beta = 1.0;
    double gamma = 1.0;
    double c_gamma = 1.0;
    double arms = 2.0;        // K
    double objectives = 2.0;  // M
    double delta = 0.01;
    double change_point = 0.0;  // t_p
    double horizon = 1.0;       // T
    double rho_pq = 1.0;
    double rho_qq = 1.0;

    void validate() const {
        if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
        if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
        if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
        if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
        if (!(arms >= 1.0) || !(objectives >= 1.0)) throw DomainError("K and M must be >= 1");
        if (!(change_point >= 0.0) || !(horizon > 0.0) || change_point > horizon) {
            throw DomainError("need 0 <= t_p <= T and T > 0");
        }
        if (!(rho_pq > 0.0) || !(rho_qq > 0.0)) throw DomainError("dissimilarities must be positive");
    }

    /// K log(KM / delta)
    double complexity() const { return arms * std::log(arms * objectives / delta); }
    double target_rounds() const { return horizon - change_point; }
};

namespace detail {

/// num / den with num / 0 read as +infinity.
inline double ratio(double num, double den) {
    return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

inline double checked_power(double base, double exponent) {
    if (!(base > 0.0) || !std::isfinite(base)) throw DomainError("bound expression has a nonpositive or infinite base");
    return std::pow(base, exponent);
}

}  // namespace detail

/// (L / max(t_p, T - t_p))^((a+1)/b) + [L min(rho_PQ / t_p, rho_QQ / (T - t_p))]^(((a+1)/a)((b+1)/b)),
/// L = K log(KM/delta).
inline double bound_single_shift(const BoundParams& p) {
    p.validate();
    const double L = p.complexity();
    const double tau = p.target_rounds();
    const double explore = detail::checked_power(L / std::max(p.change_point, tau), (p.alpha + 1.0) / p.beta);
    const double adapt_base = L * std::min(detail::ratio(p.rho_pq, p.change_point), detail::ratio(p.rho_qq, tau));
    const double adapt = detail::checked_power(adapt_base, ((p.alpha + 1.0) / p.alpha) * ((p.beta + 1.0) / p.beta));
    return explore + adapt;
}

/// The t_p = 0 form: (L/T)^((a+1)/b) + [L rho_QQ / T]^(((a+1)/a)((b+1)/b)).
inline double bound_no_shift(const BoundParams& p) {
    p.validate();
    const double L = p.complexity();
    return detail::checked_power(L / p.horizon, (p.alpha + 1.0) / p.beta) +
           detail::checked_power(L * (p.rho_qq / p.horizon), ((p.alpha + 1.0) / p.alpha) * ((p.beta + 1.0) / p.beta));
}

/// [L m]^(((a+1)/a)(g(b+1)/b)) (L/(T-t_p))^(1/a) + [L m]^((a+1)/b),
/// m = min(1/t_p, 1/(T-t_p)).
inline double bound_special_family(const BoundParams& p) {
    p.validate();
    const double L = p.complexity();
    const double tau = p.target_rounds();
    const double base = L * std::min(detail::ratio(1.0, p.change_point), detail::ratio(1.0, tau));
    const double first = detail::checked_power(base, ((p.alpha + 1.0) / p.alpha) * (p.gamma * (p.beta + 1.0) / p.beta)) *
                         detail::checked_power(L / tau, 1.0 / p.alpha);
    const double second = detail::checked_power(base, (p.alpha + 1.0) / p.beta);
    return first + second;
}

/// Single-shift bound with rho_PQ replaced by rho_depth(P~, Q), P~ the
/// duration-weighted mixture of the source phases. The horizon and change
/// point are taken from the schedule.
inline double bound_multiple_shift(const BoundParams& p, const ShiftSchedule& schedule, unsigned rho_depth) {
    BoundParams q = p;
    const Dissimilarity rho = dissimilarity(effective_mixture(schedule), schedule.target(), rho_depth);
    if (rho.unbounded) throw DomainError("mixture dissimilarity is unbounded");
    q.rho_pq = rho.value;
    q.change_point = static_cast<double>(schedule.change_point());
    q.horizon = static_cast<double>(schedule.horizon());
    return bound_single_shift(q);
}

}  // namespace pshift
