#pragma once

// Dyadic tree partition of the unit hypercube [0,1]^d.
//
// Every bin is bisected along each axis, so a bin has 2^d children and the
// side length at depth h is 2^-h. Bin (h, i) has children (h+1, i*2^d + j):
// the lowest d bits of an index are the digit chosen at the deepest level,
// and inside a digit bit a selects the upper half of axis a.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "pshift/cone.hpp"
#include "pshift/error.hpp"

namespace pshift {

using Context = Eigen::VectorXd;

struct BinId {
    unsigned depth = 0;
    std::uint64_t index = 0;

    friend auto operator<=>(const BinId&, const BinId&) = default;

    static constexpr BinId root() { return {0, 0}; }
};

inline std::string to_string(const BinId& b) {
    return "(" + std::to_string(b.depth) + "," + std::to_string(b.index) + ")";
}

/// Axis-aligned cell. Intervals are half-open [lo, hi) except that an upper
/// edge at 1 is closed.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    bool contains(const Context& x) const {
        for (std::size_t a = 0; a < lo.size(); ++a) {
            const double v = x(static_cast<Eigen::Index>(a));
            if (v < lo[a]) return false;
            if (v >= hi[a] && !(hi[a] == 1.0 && v == 1.0)) return false;
        }
        return true;
    }

    double volume() const {
        double v = 1.0;
        for (std::size_t a = 0; a < lo.size(); ++a) v *= hi[a] - lo[a];
        return v;
    }
};

/// Side length V_h = 2^-h.
inline double bin_width(unsigned depth) { return std::ldexp(1.0, -static_cast<int>(depth)); }

inline void check_bin(const BinId& bin, std::size_t dim) {
    if (dim == 0) throw DomainError("context dimension must be >= 1");
    if (static_cast<std::size_t>(bin.depth) * dim > 62) throw DomainError("bin depth too large for index type");
    const std::uint64_t count = std::uint64_t{1} << (bin.depth * dim);
    if (bin.index >= count) throw DomainError("bin index " + std::to_string(bin.index) + " out of range at depth " + std::to_string(bin.depth));
}

inline Box cell_of(const BinId& bin, std::size_t dim) {
    check_bin(bin, dim);
    Box box{std::vector<double>(dim, 0.0), std::vector<double>(dim, 0.0)};
    const std::uint64_t digit_mask = (std::uint64_t{1} << dim) - 1;
    for (unsigned level = 0; level < bin.depth; ++level) {
        const unsigned shift = static_cast<unsigned>((bin.depth - 1 - level) * dim);
        const std::uint64_t digit = (bin.index >> shift) & digit_mask;
        const double half = bin_width(level + 1);
        for (std::size_t a = 0; a < dim; ++a) {
            if ((digit >> a) & 1U) box.lo[a] += half;
        }
    }
    const double w = bin_width(bin.depth);
    for (std::size_t a = 0; a < dim; ++a) box.hi[a] = box.lo[a] + w;
    return box;
}

inline Context center_of(const BinId& bin, std::size_t dim) {
    const Box box = cell_of(bin, dim);
    Context c(static_cast<Eigen::Index>(dim));
    for (std::size_t a = 0; a < dim; ++a) c(static_cast<Eigen::Index>(a)) = 0.5 * (box.lo[a] + box.hi[a]);
    return c;
}

inline BinId parent_of(const BinId& bin, std::size_t dim) {
    if (bin.depth == 0) throw DomainError("root has no parent");
    return {bin.depth - 1, bin.index >> dim};
}

/// Per-bin statistics. Arms are 0-based.
struct BinStats {
    std::uint64_t visits = 0;
    std::vector<std::uint64_t> arm_counts;
    std::vector<RewardVector> reward_sums;
    std::vector<std::size_t> active_arms;  // sorted, never empty
    bool is_leaf = true;

    RewardVector mean(std::size_t arm) const {
        if (arm_counts[arm] == 0) return RewardVector::Zero(reward_sums[arm].size());
        return reward_sums[arm] / static_cast<double>(arm_counts[arm]);
    }

    bool is_active(std::size_t arm) const {
        return std::binary_search(active_arms.begin(), active_arms.end(), arm);
    }

    void record(std::size_t arm, const RewardVector& reward) {
        ++visits;
        ++arm_counts[arm];
        reward_sums[arm] += reward;
    }
};

struct PartitionReport {
    double leaf_volume = 0.0;          // sum over leaves, exactly 1 when sound
    std::size_t incomplete_splits = 0; // internal nodes missing children
    std::size_t nesting_violations = 0;// child active set not inside parent's
    std::size_t empty_active_sets = 0;

    bool ok() const {
        return leaf_volume == 1.0 && incomplete_splits == 0 && nesting_violations == 0 && empty_active_sets == 0;
    }
};

class TreeState {
public:
    TreeState(std::size_t context_dim, std::size_t arms, std::size_t objectives)
        : dim_(context_dim), arms_(arms), objectives_(objectives) {
        if (context_dim == 0 || context_dim > 16) throw DomainError("context dimension must be in [1, 16]");
        if (arms == 0) throw DomainError("need at least one arm");
        if (objectives == 0) throw DomainError("need at least one objective");
        BinStats root;
        root.arm_counts.assign(arms, 0);
        root.reward_sums.assign(arms, RewardVector::Zero(static_cast<Eigen::Index>(objectives)));
        for (std::size_t k = 0; k < arms; ++k) root.active_arms.push_back(k);
        nodes_.emplace(BinId::root(), std::move(root));
        leaves_.insert(BinId::root());
    }

    std::size_t context_dim() const noexcept { return dim_; }
    std::size_t branching() const noexcept { return std::size_t{1} << dim_; }
    std::size_t arms() const noexcept { return arms_; }
    std::size_t objectives() const noexcept { return objectives_; }

    const std::map<BinId, BinStats>& nodes() const noexcept { return nodes_; }
    const std::set<BinId>& leaves() const noexcept { return leaves_; }
    bool has(const BinId& bin) const { return nodes_.count(bin) != 0; }

    const BinStats& stats(const BinId& bin) const {
        auto it = nodes_.find(bin);
        if (it == nodes_.end()) throw DomainError("unknown bin " + to_string(bin));
        return it->second;
    }

    BinStats& stats(const BinId& bin) {
        auto it = nodes_.find(bin);
        if (it == nodes_.end()) throw DomainError("unknown bin " + to_string(bin));
        return it->second;
    }

    unsigned max_depth() const {
        unsigned d = 0;
        for (const auto& leaf : leaves_) d = std::max(d, leaf.depth);
        return d;
    }

    void check_context(const Context& x) const {
        if (static_cast<std::size_t>(x.size()) != dim_) throw DomainError("context has wrong dimension");
        for (Eigen::Index a = 0; a < x.size(); ++a) {
            if (!(x(a) >= 0.0 && x(a) <= 1.0)) throw DomainError("context outside [0,1]^d");
        }
    }

    /// The unique leaf whose cell contains x.
    BinId locate(const Context& x) const {
        check_context(x);
        BinId bin = BinId::root();
        while (!stats(bin).is_leaf) {
            const unsigned next = bin.depth + 1;
            const double cells = std::ldexp(1.0, static_cast<int>(next));
            std::uint64_t digit = 0;
            for (std::size_t a = 0; a < dim_; ++a) {
                const double scaled = std::min(std::floor(x(static_cast<Eigen::Index>(a)) * cells), cells - 1.0);
                if (static_cast<std::uint64_t>(scaled) & 1U) digit |= std::uint64_t{1} << a;
            }
            bin = {next, (bin.index << dim_) | digit};
        }
        return bin;
    }

    /// Replaces a leaf by its 2^d children. Children start from a copy of
    /// the parent's counts, sums and active arms; the parent is frozen.
    std::vector<BinId> split(const BinId& bin) {
        auto& parent = stats(bin);
        if (!parent.is_leaf) throw DomainError("cannot split non-leaf bin " + to_string(bin));
        if (static_cast<std::size_t>(bin.depth + 1) * dim_ > 62) throw DomainError("maximum tree depth reached");
        parent.is_leaf = false;
        leaves_.erase(bin);
        std::vector<BinId> children;
        const BinStats inherited = parent;
        for (std::uint64_t j = 0; j < branching(); ++j) {
            BinId child{bin.depth + 1, (bin.index << dim_) | j};
            BinStats s = inherited;
            s.is_leaf = true;
            nodes_.insert_or_assign(child, std::move(s));
            leaves_.insert(child);
            children.push_back(child);
        }
        return children;
    }

    PartitionReport check_invariants() const {
        PartitionReport r;
        for (const auto& leaf : leaves_) r.leaf_volume += cell_of(leaf, dim_).volume();
        for (const auto& [id, s] : nodes_) {
            if (s.active_arms.empty()) ++r.empty_active_sets;
            if (!s.is_leaf) {
                for (std::uint64_t j = 0; j < branching(); ++j) {
                    if (!has({id.depth + 1, (id.index << dim_) | j})) {
                        ++r.incomplete_splits;
                        break;
                    }
                }
            }
            if (id.depth > 0) {
                const auto& p = stats(parent_of(id, dim_));
                if (!std::includes(p.active_arms.begin(), p.active_arms.end(), s.active_arms.begin(), s.active_arms.end())) {
                    ++r.nesting_violations;
                }
            }
        }
        return r;
    }

    /// One JSON object per node and line, in (depth, index) order.
    void dump_jsonl(std::ostream& out) const {
        for (const auto& [id, s] : nodes_) {
            nlohmann::json j;
            j["depth"] = id.depth;
            j["index"] = id.index;
            j["visits"] = s.visits;
            j["arm_counts"] = s.arm_counts;
            j["active_arms"] = s.active_arms;
            j["leaf"] = s.is_leaf;
            out << j.dump() << '\n';
        }
    }

private:
    std::size_t dim_;
    std::size_t arms_;
    std::size_t objectives_;
    std::map<BinId, BinStats> nodes_;
    std::set<BinId> leaves_;
};

}  // namespace pshift
