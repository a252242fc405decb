#pragma once

// Pareto sets over finite arm collections, the scale-independent gap and
// the preference metric between fronts.

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pshift/cone.hpp"
#include "pshift/error.hpp"

namespace pshift {

/// Floor applied to mean components before taking logarithms.
inline constexpr double kMeanFloor = 1e-6;

struct ArmMeanTable {
    std::vector<RewardVector> means;
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return means.size(); }
    std::size_t dim() const noexcept { return means.empty() ? 0 : static_cast<std::size_t>(means.front().size()); }

    /// Labels default to "A0", "A1", ...
    static ArmMeanTable from_means(std::vector<RewardVector> means) {
        ArmMeanTable t;
        for (std::size_t k = 0; k < means.size(); ++k) t.labels.push_back("A" + std::to_string(k));
        t.means = std::move(means);
        t.validate();
        return t;
    }

    void validate() const {
        if (means.empty()) throw DomainError("arm table is empty");
        if (labels.size() != means.size()) throw DomainError("arm table needs one label per arm");
        const auto m = means.front().size();
        if (m == 0) throw DomainError("arm means must have at least one objective");
        for (const auto& mu : means) {
            if (mu.size() != m) throw DomainError("arm means have inconsistent dimensions");
            if (!mu.allFinite()) throw DomainError("arm means must be finite");
        }
    }
};

enum class GapMode { orthant_closed_form, grid_oracle, automatic };

struct GapSolverConfig {
    double grid_resolution = 1e-4;
    double max_log_inflation = 2.302585092994046;  // ln 10
    GapMode mode = GapMode::automatic;

    void validate() const {
        if (!(grid_resolution > 0.0) || !std::isfinite(grid_resolution)) {
            throw DomainError("grid_resolution must be positive");
        }
        if (!(max_log_inflation > 0.0) || !std::isfinite(max_log_inflation)) {
            throw DomainError("max_log_inflation must be positive");
        }
    }
};

inline RewardVector clamp_to_floor(const RewardVector& v) {
    return v.cwiseMax(kMeanFloor);
}

// Pareto sets ------------------------------------------------------------

/// Indices (ascending) of the vectors in `candidates` that no other
/// candidate dominates. Equal vectors never dominate each other.
inline std::vector<std::size_t> pareto_subset(std::span<const RewardVector> means,
                                              std::span<const std::size_t> candidates,
                                              const Cone& cone) {
    if (candidates.empty()) throw DomainError("pareto set of an empty collection");
    std::vector<std::size_t> front;
    for (auto k : candidates) {
        const bool dominated = std::any_of(candidates.begin(), candidates.end(), [&](std::size_t j) {
            return j != k && cone.dominates(means[j], means[k]);
        });
        if (!dominated) front.push_back(k);
    }
    std::sort(front.begin(), front.end());
    return front;
}

inline std::vector<std::size_t> pareto_set(std::span<const RewardVector> means, const Cone& cone) {
    std::vector<std::size_t> all(means.size());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    return pareto_subset(means, all, cone);
}

inline std::vector<std::size_t> pareto_set(const ArmMeanTable& table, const Cone& cone) {
    table.validate();
    return pareto_set(std::span<const RewardVector>(table.means), cone);
}

// Scale-independent gap ---------------------------------------------------

namespace detail {

inline RewardVector checked_log_operand(const RewardVector& v) {
    for (Eigen::Index m = 0; m < v.size(); ++m) {
        if (!std::isfinite(v(m)) || !(v(m) > 0.0)) {
            throw DomainError("gap requires positive finite mean components");
        }
    }
    return clamp_to_floor(v);
}

inline void check_front(const RewardVector& mu, std::span<const RewardVector> front, const Cone& cone) {
    if (front.empty()) throw DomainError("gap against an empty front");
    if (static_cast<std::size_t>(mu.size()) != cone.dim()) throw DomainError("arm / cone dimension mismatch");
    for (const auto& y : front) {
        if (y.size() != mu.size()) throw DomainError("front / arm dimension mismatch");
    }
}

}  // namespace detail

/// max over front members of min_m [log(y_m / mu_m)]_+.
/// Exact for the orthant: inflating every coordinate by the returned
/// amount escapes strict domination by each member.
inline double gap_orthant_closed_form(const RewardVector& mu_raw, std::span<const RewardVector> front) {
    if (front.empty()) throw DomainError("gap against an empty front");
    const RewardVector mu = detail::checked_log_operand(mu_raw);
    double worst = 0.0;
    for (const auto& y_raw : front) {
        if (y_raw.size() != mu.size()) throw DomainError("front / arm dimension mismatch");
        const RewardVector y = detail::checked_log_operand(y_raw);
        double needed = std::numeric_limits<double>::infinity();
        for (Eigen::Index m = 0; m < mu.size(); ++m) {
            needed = std::min(needed, std::max(0.0, std::log(y(m) / mu(m))));
        }
        worst = std::max(worst, needed);
    }
    return worst;
}

/// Grid search over log-inflations in [0, max_log_inflation]^M.
///
/// Points are visited shell by shell in increasing sup-norm; the first
/// shell holding a point that escapes strict domination by every front
/// member gives the answer (a multiple of grid_resolution).
inline double gap_grid_oracle(const RewardVector& mu_raw, std::span<const RewardVector> front,
                              const Cone& cone, const GapSolverConfig& cfg) {
    cfg.validate();
    detail::check_front(mu_raw, front, cone);
    const RewardVector mu = detail::checked_log_operand(mu_raw);
    const auto dim = static_cast<std::size_t>(mu.size());
    const Matrix& normals = cone.halfspace_normals();

    std::vector<RewardVector> front_images;  // A y for each member
    front_images.reserve(front.size());
    for (const auto& y : front) front_images.push_back(normals * detail::checked_log_operand(y));

    const auto shells = static_cast<std::size_t>(std::ceil(cfg.max_log_inflation / cfg.grid_resolution - 1e-9));
    std::vector<double> growth(shells + 1);
    for (std::size_t i = 0; i <= shells; ++i) growth[i] = std::exp(static_cast<double>(i) * cfg.grid_resolution);

    RewardVector image(normals.rows());
    auto feasible = [&](const std::vector<std::size_t>& point) {
        image.setZero();
        for (std::size_t m = 0; m < dim; ++m) {
            image.noalias() += normals.col(static_cast<Eigen::Index>(m)) * (mu(static_cast<Eigen::Index>(m)) * growth[point[m]]);
        }
        for (const auto& ay : front_images) {
            if (((ay - image).array() > kBoundaryTol).all()) return false;
        }
        return true;
    };

    std::vector<std::size_t> point(dim, 0);
    if (feasible(point)) return 0.0;

    for (std::size_t s = 1; s <= shells; ++s) {
        // Every point with max coordinate s, counted once: the first axis
        // reaching s is `pivot`, earlier axes are < s, later ones <= s.
        for (std::size_t pivot = 0; pivot < dim; ++pivot) {
            std::fill(point.begin(), point.end(), 0);
            point[pivot] = s;
            while (true) {
                if (feasible(point)) return static_cast<double>(s) * cfg.grid_resolution;
                std::size_t axis = 0;
                for (; axis < dim; ++axis) {
                    if (axis == pivot) continue;
                    const std::size_t limit = axis < pivot ? s - 1 : s;
                    if (point[axis] < limit) {
                        ++point[axis];
                        break;
                    }
                    point[axis] = 0;
                }
                if (axis == dim) break;
            }
        }
    }
    throw DomainError("gap exceeds max_log_inflation; increase the search range");
}

/// Smallest sup-norm log-inflation of `mu` that leaves it strictly
/// dominated by no member of `front`.
inline double gap(const RewardVector& mu, std::span<const RewardVector> front, const Cone& cone,
                  const GapSolverConfig& cfg = {}) {
    detail::check_front(mu, front, cone);
    switch (cfg.mode) {
        case GapMode::orthant_closed_form:
            if (!cone.is_orthant()) throw DomainError("closed-form gap is only valid for the orthant");
            return gap_orthant_closed_form(mu, front);
        case GapMode::grid_oracle:
            return gap_grid_oracle(mu, front, cone, cfg);
        case GapMode::automatic:
            break;
    }
    return cone.is_orthant() ? gap_orthant_closed_form(mu, front) : gap_grid_oracle(mu, front, cone, cfg);
}

/// Gap of arm `k` of `table` against the arms listed in `front`.
/// Exactly 0 when k belongs to the front.
inline double gap(std::size_t k, std::span<const std::size_t> front, const ArmMeanTable& table,
                  const Cone& cone, const GapSolverConfig& cfg = {}) {
    table.validate();
    if (k >= table.size()) throw DomainError("arm index out of range");
    if (front.empty()) throw DomainError("gap against an empty front");
    if (std::find(front.begin(), front.end(), k) != front.end()) return 0.0;
    std::vector<RewardVector> members;
    for (auto j : front) {
        if (j >= table.size()) throw DomainError("front index out of range");
        members.push_back(table.means[j]);
    }
    return gap(table.means[k], members, cone, cfg);
}

// Preference metric -------------------------------------------------------

/// sup_{a in lhs} gap(a, rhs), 0 for an empty lhs.
inline double directed_gap(std::span<const RewardVector> lhs, std::span<const RewardVector> rhs,
                           const Cone& cone, const GapSolverConfig& cfg = {}) {
    double worst = 0.0;
    for (const auto& a : lhs) worst = std::max(worst, gap(a, rhs, cone, cfg));
    return worst;
}

/// Symmetrised worst-case gap between two fronts given as vector sets.
inline double pref_distance(std::span<const RewardVector> front1, std::span<const RewardVector> front2,
                            const Cone& cone, const GapSolverConfig& cfg = {}) {
    if (front1.empty() || front2.empty()) throw DomainError("preference distance needs non-empty fronts");
    return std::max(directed_gap(front1, front2, cone, cfg), directed_gap(front2, front1, cone, cfg));
}

}  // namespace pshift
