#pragma once

// Adaptive tree discretization with optimistic elimination of arms, run as
// a stepwise state machine, plus the uniform-random baseline.
//
// One step:
//   warm-up (t < warmup_rounds): play arm t mod K and record the reward in
//   the leaf holding x.
//   otherwise: locate the leaf of x, build the optimistic front from upper
//   confidence vectors of the active arms, drop arms that trail a front
//   member by more than twice their confidence radius in some objective,
//   play uniformly among the survivors, update the leaf and split it once
//   sqrt(8 K log(KM/delta) / n) < V_h^beta.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pshift/cone.hpp"
#include "pshift/environment.hpp"
#include "pshift/error.hpp"
#include "pshift/pareto.hpp"
#include "pshift/partition.hpp"

namespace pshift {

struct PolicyParams {
    std::size_t arms = 2;        // K
    std::size_t objectives = 2;  // M
    double delta = 0.01;
    double beta = 1.0;
    double c_beta = 1.0;
    double sigma = 1.0;
    double c1 = 1.0;
    double c2 = 2.0;
    std::optional<std::uint64_t> warmup_override;

    /// log(K M / delta)
    double log_term() const {
        return std::log(static_cast<double>(arms) * static_cast<double>(objectives) / delta);
    }

    /// ceil(8 K log(KM/delta)) unless overridden.
    std::uint64_t warmup_rounds() const {
        if (warmup_override) return *warmup_override;
        return static_cast<std::uint64_t>(std::ceil(8.0 * static_cast<double>(arms) * log_term()));
    }

    void validate() const {
        if (arms == 0) throw DomainError("policy needs K >= 1");
        if (objectives == 0) throw DomainError("policy needs M >= 1");
        if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
        if (!(beta > 0.0 && beta <= 1.0)) throw DomainError("beta must lie in (0, 1]");
        if (!(c_beta > 0.0)) throw DomainError("c_beta must be positive");
        if (!(sigma >= 0.0)) throw DomainError("sigma must be >= 0");
        // Zero is allowed so the radius can be switched off entirely.
        if (!(c1 >= 0.0) || !(c2 >= 0.0)) throw DomainError("c1 and c2 must be >= 0");
    }
};

struct StepRecord {
    std::uint64_t t = 0;  // 0-based policy round
    Context context;
    BinId bin;
    std::vector<std::size_t> estimated_front;
    std::vector<std::size_t> active_set;
    /// Arms played with positive probability this round.
    std::vector<std::size_t> support;
    std::size_t played_arm = 0;
    RewardVector reward;
    bool warmup = false;
    bool split_occurred = false;
};

/// Counters for assertions made while stepping.
struct RuntimeChecks {
    std::uint64_t depth_violations = 0;    // locate returned a split bin
    std::uint64_t nesting_violations = 0;  // active set grew or left parent's
    std::uint64_t empty_active_sets = 0;
    std::uint64_t front_escapes = 0;       // front member not in refined set

    std::uint64_t total() const { return depth_violations + nesting_violations + empty_active_sets + front_escapes; }
};

namespace detail {

inline std::vector<std::size_t> all_arms(std::size_t k) {
    std::vector<std::size_t> v(k);
    for (std::size_t i = 0; i < k; ++i) v[i] = i;
    return v;
}

inline void check_reward(const RewardVector& r, std::size_t objectives) {
    if (static_cast<std::size_t>(r.size()) != objectives) throw DomainError("reward has wrong dimension");
}

}  // namespace detail

class ParetoTreePolicy {
public:
    ParetoTreePolicy(PolicyParams params, Cone cone, std::size_t context_dim, Rng rng)
        : params_((params.validate(), params)),
          cone_(std::move(cone)),
          tree_(context_dim, params_.arms, params_.objectives),
          rng_(rng) {
        if (cone_.dim() != params_.objectives) throw DomainError("cone dimension must equal the number of objectives");
    }

    const PolicyParams& params() const noexcept { return params_; }
    const Cone& cone() const noexcept { return cone_; }
    const TreeState& tree() const noexcept { return tree_; }
    TreeState& tree() noexcept { return tree_; }
    std::uint64_t round() const noexcept { return t_; }
    const RuntimeChecks& checks() const noexcept { return checks_; }

    /// Scalar confidence radius c1 C_beta V_h^beta + c2 sigma sqrt(log(KM/delta) / n_k).
    /// An arm never played in the bin uses V_0 and n = 1.
    double radius(const BinId& bin, std::size_t arm) const {
        const auto& s = tree_.stats(bin);
        if (arm >= params_.arms) throw DomainError("arm index out of range");
        const std::uint64_t n = s.arm_counts[arm];
        const double width = n == 0 ? bin_width(0) : bin_width(bin.depth);
        const double count = n == 0 ? 1.0 : static_cast<double>(n);
        return params_.c1 * params_.c_beta * std::pow(width, params_.beta) +
               params_.c2 * params_.sigma * std::sqrt(params_.log_term() / count);
    }

    RewardVector ucb(const BinId& bin, std::size_t arm) const {
        const auto& s = tree_.stats(bin);
        if (arm >= params_.arms || !s.is_active(arm)) throw DomainError("ucb requested for an inactive arm");
        return s.mean(arm).array() + radius(bin, arm);
    }

    /// Active arms whose upper confidence vector no other active arm
    /// strictly dominates.
    std::vector<std::size_t> optimistic_front(const BinId& bin) const {
        const auto& active = tree_.stats(bin).active_arms;
        std::vector<RewardVector> bounds;
        bounds.reserve(active.size());
        for (auto k : active) bounds.push_back(ucb(bin, k));
        std::vector<std::size_t> front;
        for (std::size_t a = 0; a < active.size(); ++a) {
            bool dominated = false;
            for (std::size_t b = 0; b < active.size() && !dominated; ++b) {
                dominated = b != a && cone_.strictly_dominates(bounds[b], bounds[a]);
            }
            if (!dominated) front.push_back(active[a]);
        }
        return front;
    }

    /// Front members are always kept. Another active arm k survives iff no
    /// front member beats its estimate by more than 2 radius(k) in any
    /// objective.
    std::vector<std::size_t> refine_active(const BinId& bin, std::span<const std::size_t> front) const {
        const auto& s = tree_.stats(bin);
        std::vector<RewardVector> front_means;
        for (auto j : front) front_means.push_back(s.mean(j));
        std::vector<std::size_t> kept;
        for (auto k : s.active_arms) {
            if (std::find(front.begin(), front.end(), k) != front.end()) {
                kept.push_back(k);
                continue;
            }
            const RewardVector mu = s.mean(k);
            const double slack = 2.0 * radius(bin, k);
            const bool trails = std::any_of(front_means.begin(), front_means.end(),
                                            [&](const RewardVector& y) { return (y - mu).maxCoeff() > slack; });
            if (!trails) kept.push_back(k);
        }
        return kept;
    }

    /// Expansion test sqrt(8 K log(KM/delta) / n) < V_h^beta on the bin's
    /// visit count; false while the bin is unvisited.
    bool should_split(const BinId& bin) const {
        const auto n = tree_.stats(bin).visits;
        if (n == 0) return false;
        const double lhs = std::sqrt(8.0 * static_cast<double>(params_.arms) * params_.log_term() / static_cast<double>(n));
        return lhs < std::pow(bin_width(bin.depth), params_.beta);
    }

    template <typename RewardSource>
    StepRecord step(const Context& x, RewardSource&& reward_source) {
        tree_.check_context(x);
        StepRecord rec;
        rec.t = t_;
        rec.context = x;
        rec.bin = tree_.locate(x);
        auto& leaf = tree_.stats(rec.bin);
        if (!leaf.is_leaf) ++checks_.depth_violations;

        if (t_ < params_.warmup_rounds()) {
            rec.warmup = true;
            rec.played_arm = static_cast<std::size_t>(t_ % params_.arms);
            rec.active_set = leaf.active_arms;
            rec.estimated_front = leaf.active_arms;
            rec.support = {rec.played_arm};
        } else {
            rec.active_set = leaf.active_arms;
            rec.estimated_front = optimistic_front(rec.bin);
            auto refined = refine_active(rec.bin, rec.estimated_front);
            if (refined.empty()) ++checks_.empty_active_sets;
            if (!std::includes(refined.begin(), refined.end(), rec.estimated_front.begin(), rec.estimated_front.end())) {
                ++checks_.front_escapes;
            }
            if (!std::includes(leaf.active_arms.begin(), leaf.active_arms.end(), refined.begin(), refined.end())) {
                ++checks_.nesting_violations;
            }
            leaf.active_arms = refined;
            rec.active_set = refined;
            std::uniform_int_distribution<std::size_t> pick(0, refined.size() - 1);
            rec.played_arm = refined[pick(rng_)];
            rec.support = refined;
        }

        rec.reward = reward_source(rec.played_arm);
        detail::check_reward(rec.reward, params_.objectives);
        leaf.record(rec.played_arm, rec.reward);

        if (!rec.warmup && should_split(rec.bin)) {
            tree_.split(rec.bin);
            rec.split_occurred = true;
        }
        ++t_;
        return rec;
    }

private:
    PolicyParams params_;
    Cone cone_;
    TreeState tree_;
    Rng rng_;
    std::uint64_t t_ = 0;
    RuntimeChecks checks_;
};

/// Plays a uniformly random arm every round. Its per-round decision is the
/// drawn arm, which is also its support.
class RandomBaseline {
public:
    RandomBaseline(std::size_t arms, std::size_t objectives, Rng rng)
        : arms_(arms), objectives_(objectives), rng_(rng) {
        if (arms == 0) throw DomainError("baseline needs K >= 1");
    }

    std::uint64_t round() const noexcept { return t_; }

    template <typename RewardSource>
    StepRecord step(const Context& x, RewardSource&& reward_source) {
        StepRecord rec;
        rec.t = t_;
        rec.context = x;
        std::uniform_int_distribution<std::size_t> pick(0, arms_ - 1);
        rec.played_arm = pick(rng_);
        rec.active_set = detail::all_arms(arms_);
        rec.estimated_front = rec.active_set;
        rec.support = {rec.played_arm};
        rec.reward = reward_source(rec.played_arm);
        detail::check_reward(rec.reward, objectives_);
        ++t_;
        return rec;
    }

private:
    std::size_t arms_;
    std::size_t objectives_;
    Rng rng_;
    std::uint64_t t_ = 0;
};

}  // namespace pshift
