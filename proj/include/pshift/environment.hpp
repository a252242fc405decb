#pragma once

// Context distributions, shift schedules and synthetic reward instances.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pshift/cone.hpp"
#include "pshift/error.hpp"
#include "pshift/pareto.hpp"
#include "pshift/partition.hpp"
#include "pshift/rng.hpp"

namespace pshift {

/// Samplers never emit a coordinate above this value.
inline constexpr double kContextCeiling = 1.0 - 1e-9;

// Distributions -----------------------------------------------------------

enum class DistributionKind { uniform, power_law, mixture };

/// A context distribution on [0,1]^d: uniform, the power law with density
/// (nu+1) x^nu on [0,1], or a finite mixture of those.
class Distribution {
public:
    static Distribution uniform(std::size_t dim = 1) {
        if (dim == 0) throw DomainError("distribution dimension must be >= 1");
        Distribution d;
        d.kind_ = DistributionKind::uniform;
        d.dim_ = dim;
        return d;
    }

    static Distribution power_law(double nu) {
        if (!(nu > -1.0) || !std::isfinite(nu)) throw DomainError("power law exponent must satisfy nu > -1");
        Distribution d;
        d.kind_ = DistributionKind::power_law;
        d.nu_ = nu;
        return d;
    }

    static Distribution mixture(std::vector<double> weights, std::vector<Distribution> components) {
        if (weights.empty() || weights.size() != components.size()) {
            throw DomainError("mixture needs one weight per component");
        }
        double total = 0.0;
        for (double w : weights) {
            if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("mixture weights must be positive");
            total += w;
        }
        if (std::abs(total - 1.0) > 1e-9) throw DomainError("mixture weights must sum to 1");
        const auto dim = components.front().dim();
        for (const auto& c : components) {
            if (c.dim() != dim) throw DomainError("mixture components have different dimensions");
        }
        Distribution d;
        d.kind_ = DistributionKind::mixture;
        d.dim_ = dim;
        d.weights_ = std::move(weights);
        d.components_ = std::make_shared<const std::vector<Distribution>>(std::move(components));
        return d;
    }

    DistributionKind kind() const noexcept { return kind_; }
    std::size_t dim() const noexcept { return dim_; }
    double nu() const noexcept { return nu_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<Distribution>& components() const {
        static const std::vector<Distribution> none;
        return components_ ? *components_ : none;
    }

    Context sample(Rng& rng) const {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        switch (kind_) {
            case DistributionKind::uniform: {
                Context x(static_cast<Eigen::Index>(dim_));
                for (Eigen::Index a = 0; a < x.size(); ++a) x(a) = std::min(unit(rng), kContextCeiling);
                return x;
            }
            case DistributionKind::power_law: {
                Context x(1);
                x(0) = std::min(std::pow(unit(rng), 1.0 / (nu_ + 1.0)), kContextCeiling);
                return x;
            }
            case DistributionKind::mixture: {
                std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
                return (*components_)[pick(rng)].sample(rng);
            }
        }
        throw DomainError("unknown distribution kind");
    }

    /// Probability mass of an axis-aligned cell.
    double cell_mass(const Box& box) const {
        if (box.lo.size() != dim_) throw DomainError("cell / distribution dimension mismatch");
        switch (kind_) {
            case DistributionKind::uniform:
                return box.volume();
            case DistributionKind::power_law:
                return std::pow(box.hi[0], nu_ + 1.0) - std::pow(box.lo[0], nu_ + 1.0);
            case DistributionKind::mixture: {
                double mass = 0.0;
                for (std::size_t j = 0; j < weights_.size(); ++j) mass += weights_[j] * (*components_)[j].cell_mass(box);
                return mass;
            }
        }
        throw DomainError("unknown distribution kind");
    }

    /// Mean of the first coordinate.
    double mean() const {
        switch (kind_) {
            case DistributionKind::uniform: return 0.5;
            case DistributionKind::power_law: return (nu_ + 1.0) / (nu_ + 2.0);
            case DistributionKind::mixture: {
                double m = 0.0;
                for (std::size_t j = 0; j < weights_.size(); ++j) m += weights_[j] * (*components_)[j].mean();
                return m;
            }
        }
        throw DomainError("unknown distribution kind");
    }

    friend bool operator==(const Distribution& a, const Distribution& b) {
        if (a.kind_ != b.kind_ || a.dim_ != b.dim_ || a.nu_ != b.nu_ || a.weights_ != b.weights_) return false;
        return a.components() == b.components();
    }

private:
    Distribution() = default;

    DistributionKind kind_ = DistributionKind::uniform;
    std::size_t dim_ = 1;
    double nu_ = 0.0;
    std::vector<double> weights_;
    std::shared_ptr<const std::vector<Distribution>> components_;
};

// Shift schedules ---------------------------------------------------------

struct Phase {
    Distribution distribution;
    std::uint64_t duration = 0;
};

/// Source phases P_1 .. P_n with durations t_1 .. t_n, then the target Q up
/// to the horizon. Rounds are numbered 1 .. horizon.
class ShiftSchedule {
public:
    ShiftSchedule(std::vector<Phase> phases, Distribution target, std::uint64_t horizon)
        : phases_(std::move(phases)), target_(std::move(target)), horizon_(horizon) {
        std::uint64_t total = 0;
        for (const auto& p : phases_) {
            if (p.duration == 0) throw DomainError("phase duration must be >= 1");
            if (p.distribution.dim() != target_.dim()) throw DomainError("phase and target dimensions differ");
            total += p.duration;
        }
        if (horizon_ == 0) throw DomainError("horizon must be >= 1");
        if (total > horizon_) throw DomainError("source phases exceed the horizon");
        change_point_ = total;
    }

    const std::vector<Phase>& phases() const noexcept { return phases_; }
    const Distribution& target() const noexcept { return target_; }
    std::uint64_t horizon() const noexcept { return horizon_; }
    /// t_p, the total source duration.
    std::uint64_t change_point() const noexcept { return change_point_; }
    std::uint64_t target_rounds() const noexcept { return horizon_ - change_point_; }
    std::size_t context_dim() const noexcept { return target_.dim(); }

    const Distribution& distribution_at(std::uint64_t t) const {
        if (t < 1 || t > horizon_) throw DomainError("round " + std::to_string(t) + " outside the horizon");
        std::uint64_t end = 0;
        for (const auto& p : phases_) {
            end += p.duration;
            if (t <= end) return p.distribution;
        }
        return target_;
    }

private:
    std::vector<Phase> phases_;
    Distribution target_;
    std::uint64_t horizon_;
    std::uint64_t change_point_ = 0;
};

inline Context sample_context(const ShiftSchedule& schedule, std::uint64_t t, Rng& rng) {
    return schedule.distribution_at(t).sample(rng);
}

// Reward instances --------------------------------------------------------

/// The biobjective family used in the synthetic experiments, with
/// k1(x) = 5 / (4(1-x)) and k2(x) = 5 / (5-4x). Arms are 1..K in the
/// formulas and 0..K-1 in the API.
struct AppendixBiobjective {
    std::size_t arms = 10;
};

struct TableFixed {
    ArmMeanTable table;
    std::size_t context_dim = 1;
};

/// A triangular bump amplitude * max(0, 1 - |x - center| / radius)^beta.
struct HolderBump {
    Context center;
    double radius = 1.0;
    RewardVector amplitude;
};

struct HolderArm {
    RewardVector offset;
    std::vector<HolderBump> bumps;
};

/// Arm means built from Hölder bumps of common exponent beta.
struct HolderMixture {
    double beta = 1.0;
    std::size_t context_dim = 1;
    std::vector<HolderArm> arms;
};

struct ParetoAtContext {
    std::vector<std::size_t> arms;
    std::vector<RewardVector> means;  // floored at kMeanFloor
};

class Instance {
public:
    using Model = std::variant<AppendixBiobjective, TableFixed, HolderMixture>;

    explicit Instance(Model model) : model_(std::move(model)) { validate(); }

    static Instance appendix(std::size_t arms) { return Instance(AppendixBiobjective{arms}); }
    static Instance table_fixed(ArmMeanTable table, std::size_t context_dim = 1) {
        return Instance(TableFixed{std::move(table), context_dim});
    }

    const Model& model() const noexcept { return model_; }

    std::size_t arms() const {
        return std::visit([](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AppendixBiobjective>) return m.arms;
            else if constexpr (std::is_same_v<T, TableFixed>) return m.table.size();
            else return m.arms.size();
        }, model_);
    }

    std::size_t objectives() const {
        return std::visit([](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AppendixBiobjective>) return 2;
            else if constexpr (std::is_same_v<T, TableFixed>) return m.table.dim();
            else return static_cast<std::size_t>(m.arms.front().offset.size());
        }, model_);
    }

    std::size_t context_dim() const {
        return std::visit([](const auto& m) -> std::size_t {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AppendixBiobjective>) return 1;
            else return m.context_dim;
        }, model_);
    }

    /// Hölder exponent and constant the means satisfy by construction.
    std::pair<double, double> holder() const {
        return std::visit([](const auto& m) -> std::pair<double, double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AppendixBiobjective>) {
                return {1.0, 4.0};
            } else if constexpr (std::is_same_v<T, TableFixed>) {
                return {1.0, 0.0};
            } else {
                double c = 0.0;
                for (const auto& arm : m.arms) {
                    double arm_c = 0.0;
                    for (const auto& b : arm.bumps) arm_c += b.amplitude.cwiseAbs().maxCoeff() / std::pow(b.radius, m.beta);
                    c = std::max(c, arm_c);
                }
                return {m.beta, c};
            }
        }, model_);
    }

    RewardVector mean_reward(std::size_t arm, const Context& x) const {
        if (arm >= arms()) throw DomainError("arm index out of range");
        if (static_cast<std::size_t>(x.size()) != context_dim()) throw DomainError("context has wrong dimension");
        for (Eigen::Index a = 0; a < x.size(); ++a) {
            if (!(x(a) >= 0.0 && x(a) <= 1.0)) throw DomainError("context outside [0,1]^d");
        }
        return std::visit([&](const auto& m) -> RewardVector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AppendixBiobjective>) {
                return appendix_mean(arm + 1, x(0));
            } else if constexpr (std::is_same_v<T, TableFixed>) {
                return m.table.means[arm];
            } else {
                const auto& profile = m.arms[arm];
                RewardVector mu = profile.offset;
                for (const auto& b : profile.bumps) {
                    const double u = (x - b.center).norm() / b.radius;
                    if (u < 1.0) mu += b.amplitude * std::pow(1.0 - u, m.beta);
                }
                return mu;
            }
        }, model_);
    }

    /// Mean plus i.i.d. N(0, sigma^2) noise per component.
    RewardVector draw_reward(std::size_t arm, const Context& x, double sigma, Rng& rng) const {
        if (!(sigma >= 0.0)) throw DomainError("noise scale must be >= 0");
        RewardVector r = mean_reward(arm, x);
        if (sigma > 0.0) {
            std::normal_distribution<double> noise(0.0, sigma);
            for (Eigen::Index m = 0; m < r.size(); ++m) r(m) += noise(rng);
        }
        return r;
    }

    std::vector<RewardVector> all_means(const Context& x) const {
        std::vector<RewardVector> out;
        out.reserve(arms());
        for (std::size_t k = 0; k < arms(); ++k) out.push_back(mean_reward(k, x));
        return out;
    }

    /// Brute-force Pareto set of the true means at x.
    ParetoAtContext oracle_pareto(const Context& x, const Cone& cone) const {
        const auto means = all_means(x);
        ParetoAtContext out;
        out.arms = pareto_set(std::span<const RewardVector>(means), cone);
        for (auto k : out.arms) out.means.push_back(clamp_to_floor(means[k]));
        return out;
    }

    /// Printed formulas, k 1-based. Defined for x < 1.
    static RewardVector appendix_mean(std::size_t k, double x) {
        if (k == 0) throw DomainError("appendix arms are numbered from 1");
        if (!(x >= 0.0 && x <= kContextCeiling)) throw DomainError("appendix instance is defined on [0, 1 - 1e-9]");
        const double kk = static_cast<double>(k);
        const double k1 = 5.0 / (4.0 * (1.0 - x));
        const double k2 = 5.0 / (5.0 - 4.0 * x);
        RewardVector mu(2);
        mu(0) = std::max(0.0, 1.0 - 5.0 * (1.0 / kk - 1.0 / k1));
        mu(1) = kk > k2 ? std::max(0.0, 1.0 - 5.0 * (1.0 / k2 - 1.0 / kk))
                        : std::max(0.0, 0.25 * (1.0 / kk - 1.0 / k2));
        return mu;
    }

private:
    void validate() const {
        std::visit([](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, AppendixBiobjective>) {
                if (m.arms == 0) throw DomainError("appendix instance needs K >= 1");
            } else if constexpr (std::is_same_v<T, TableFixed>) {
                m.table.validate();
                if (m.context_dim == 0) throw DomainError("context dimension must be >= 1");
            } else {
                if (m.arms.empty()) throw DomainError("holder mixture needs at least one arm");
                if (!(m.beta > 0.0 && m.beta <= 1.0)) throw DomainError("holder exponent must lie in (0, 1]");
                if (m.context_dim == 0) throw DomainError("context dimension must be >= 1");
                const auto dim = m.arms.front().offset.size();
                if (dim == 0) throw DomainError("holder arms need at least one objective");
                for (const auto& arm : m.arms) {
                    if (arm.offset.size() != dim) throw DomainError("holder arms have inconsistent objectives");
                    for (const auto& b : arm.bumps) {
                        if (b.amplitude.size() != dim) throw DomainError("bump amplitude has wrong dimension");
                        if (static_cast<std::size_t>(b.center.size()) != m.context_dim) throw DomainError("bump center has wrong dimension");
                        if (!(b.radius > 0.0)) throw DomainError("bump radius must be positive");
                    }
                }
            }
        }, model_);
    }

    Model model_;
};

/// Compares the enumerated front of the appendix instance against the
/// index interval [floor(k1(x)), ceil(k2(x))] (1-based arms).
struct IntervalDiagnostic {
    std::size_t interval_lo = 0;
    std::size_t interval_hi = 0;
    std::vector<std::size_t> front;  // 1-based
    bool matches = false;
};

inline IntervalDiagnostic appendix_interval_diagnostic(std::size_t arms, double x, const Cone& cone) {
    const Instance inst = Instance::appendix(arms);
    Context cx(1);
    cx(0) = x;
    IntervalDiagnostic diag;
    const double k1 = 5.0 / (4.0 * (1.0 - x));
    const double k2 = 5.0 / (5.0 - 4.0 * x);
    diag.interval_lo = static_cast<std::size_t>(std::floor(k1));
    diag.interval_hi = static_cast<std::size_t>(std::ceil(k2));
    std::vector<std::size_t> expected;
    for (std::size_t k = std::max<std::size_t>(1, diag.interval_lo); k <= std::min(arms, diag.interval_hi); ++k) expected.push_back(k);
    for (auto k : inst.oracle_pareto(cx, cone).arms) diag.front.push_back(k + 1);
    diag.matches = diag.front == expected;
    return diag;
}

}  // namespace pshift
