#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pshift/partition.hpp"

using namespace pshift;

namespace {

Context pt(std::initializer_list<double> v) {
    Context out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

}  // namespace

TEST(Cells, OneDimensional) {
    auto root = cell_of({0, 0}, 1);
    EXPECT_EQ(root.lo[0], 0.0);
    EXPECT_EQ(root.hi[0], 1.0);
    auto c = cell_of({2, 3}, 1);
    EXPECT_EQ(c.lo[0], 0.75);
    EXPECT_EQ(c.hi[0], 1.0);
    EXPECT_EQ(center_of({0, 0}, 1)(0), 0.5);
    EXPECT_EQ(center_of({2, 3}, 1)(0), 0.875);
}

TEST(Cells, TwoDimensional) {
    auto c = cell_of({1, 0}, 2);
    EXPECT_EQ(c.lo, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(c.hi, (std::vector<double>{0.5, 0.5}));
    EXPECT_TRUE(center_of({1, 0}, 2).isApprox(pt({0.25, 0.25})));
    // Bit a of a digit selects the upper half of axis a.
    auto upper_x = cell_of({1, 1}, 2);
    EXPECT_EQ(upper_x.lo, (std::vector<double>{0.5, 0.0}));
}

TEST(Cells, InvalidBin) {
    EXPECT_THROW(cell_of({1, 2}, 1), DomainError);
    EXPECT_THROW(cell_of({0, 0}, 0), DomainError);
    EXPECT_THROW(parent_of({0, 0}, 1), DomainError);
}

TEST(Cells, ChildrenTileParent) {
    for (std::size_t d = 1; d <= 3; ++d) {
        for (std::uint64_t i = 0; i < (std::uint64_t{1} << (2 * d)); ++i) {
            const BinId bin{2, i};
            const Box parent = cell_of(bin, d);
            double volume = 0.0;
            for (std::uint64_t j = 0; j < (std::uint64_t{1} << d); ++j) {
                const BinId child{3, (i << d) | j};
                EXPECT_EQ(parent_of(child, d), bin);
                const Box b = cell_of(child, d);
                volume += b.volume();
                for (std::size_t a = 0; a < d; ++a) {
                    EXPECT_GE(b.lo[a], parent.lo[a]);
                    EXPECT_LE(b.hi[a], parent.hi[a]);
                }
            }
            EXPECT_DOUBLE_EQ(volume, parent.volume());
        }
    }
}

TEST(Tree, LocateAndSplit) {
    TreeState tree(1, 3, 2);
    EXPECT_EQ(tree.locate(pt({0.3})), BinId::root());
    auto children = tree.split(BinId::root());
    ASSERT_EQ(children.size(), 2u);
    for (const auto& c : children) EXPECT_EQ(tree.stats(c).active_arms, (std::vector<std::size_t>{0, 1, 2}));
    EXPECT_EQ(tree.locate(pt({0.6})), (BinId{1, 1}));
    EXPECT_EQ(tree.locate(pt({0.1})), (BinId{1, 0}));
    EXPECT_EQ(tree.locate(pt({1.0})), (BinId{1, 1}));
    tree.split({1, 1});
    EXPECT_EQ(tree.locate(pt({1.0})), (BinId{2, 3}));
    EXPECT_THROW(tree.split({1, 1}), DomainError);
    EXPECT_THROW(tree.split(BinId::root()), DomainError);
    EXPECT_THROW(tree.locate(pt({1.5})), DomainError);
    EXPECT_THROW(tree.locate(pt({0.5, 0.5})), DomainError);
}

TEST(Tree, ChildrenInheritStatistics) {
    TreeState tree(1, 2, 2);
    RewardVector r(2);
    r << 1.0, 3.0;
    tree.stats(BinId::root()).record(1, r);
    tree.stats(BinId::root()).active_arms = {1};
    tree.split(BinId::root());
    const auto& child = tree.stats({1, 0});
    EXPECT_EQ(child.visits, 1u);
    EXPECT_EQ(child.arm_counts[1], 1u);
    EXPECT_TRUE(child.mean(1).isApprox(r));
    EXPECT_EQ(child.active_arms, std::vector<std::size_t>{1});
    EXPECT_FALSE(tree.stats(BinId::root()).is_leaf);
}

TEST(Tree, RandomSplitsKeepInvariants) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t d = 1; d <= 3; ++d) {
        TreeState tree(d, 4, 2);
        for (int s = 0; s < 60; ++s) {
            Context x(static_cast<Eigen::Index>(d));
            for (Eigen::Index a = 0; a < x.size(); ++a) x(a) = u(rng);
            const BinId leaf = tree.locate(x);
            EXPECT_TRUE(cell_of(leaf, d).contains(x));
            if (leaf.depth < 6) tree.split(leaf);
        }
        const auto report = tree.check_invariants();
        EXPECT_TRUE(report.ok()) << report.leaf_volume;
        // Every sampled point falls in exactly one leaf.
        for (int s = 0; s < 200; ++s) {
            Context x(static_cast<Eigen::Index>(d));
            for (Eigen::Index a = 0; a < x.size(); ++a) x(a) = u(rng);
            int hits = 0;
            for (const auto& leaf : tree.leaves()) hits += cell_of(leaf, d).contains(x);
            EXPECT_EQ(hits, 1);
        }
    }
}

TEST(Tree, NestingViolationIsReported) {
    TreeState tree(1, 3, 1);
    tree.split(BinId::root());
    tree.stats(BinId::root()).active_arms = {0};
    EXPECT_EQ(tree.check_invariants().nesting_violations, 2u);
}

TEST(Tree, DumpHasOneLinePerNode) {
    TreeState tree(2, 2, 2);
    tree.split(BinId::root());
    std::ostringstream out;
    tree.dump_jsonl(out);
    const std::string text = out.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
    EXPECT_NE(text.find("\"leaf\":false"), std::string::npos);
}
