#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "pshift/environment.hpp"

using namespace pshift;

namespace {

Context at(double x) {
    Context c(1);
    c(0) = x;
    return c;
}

double sample_mean(const Distribution& d, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += d.sample(rng)(0);
    return s / static_cast<double>(n);
}

}  // namespace

TEST(Distribution, Moments) {
    EXPECT_NEAR(sample_mean(Distribution::uniform(), 100000, 1), 0.5, 0.005);
    EXPECT_NEAR(sample_mean(Distribution::power_law(1.0), 100000, 2), 2.0 / 3.0, 0.005);
    EXPECT_NEAR(sample_mean(Distribution::power_law(2.0), 100000, 3), 0.75, 0.005);
    EXPECT_DOUBLE_EQ(Distribution::power_law(1.0).mean(), 2.0 / 3.0);
}

TEST(Distribution, CellMassMatchesSamples) {
    const auto p = Distribution::power_law(2.0);
    Rng rng(4);
    const Box lower = cell_of({1, 0}, 1);
    int hits = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) hits += lower.contains(p.sample(rng));
    EXPECT_DOUBLE_EQ(p.cell_mass(lower), 0.125);
    EXPECT_NEAR(static_cast<double>(hits) / n, 0.125, 0.003);
}

TEST(Distribution, MixtureWeightsChecked) {
    EXPECT_THROW(Distribution::mixture({0.5, 0.4}, {Distribution::uniform(), Distribution::power_law(1)}), DomainError);
    EXPECT_THROW(Distribution::mixture({1.0}, {}), DomainError);
    EXPECT_THROW(Distribution::power_law(-1.0), DomainError);
    const auto m = Distribution::mixture({0.25, 0.75}, {Distribution::uniform(), Distribution::power_law(1)});
    EXPECT_DOUBLE_EQ(m.cell_mass(cell_of({1, 0}, 1)), 0.25 * 0.5 + 0.75 * 0.25);
}

TEST(Schedule, BoundaryIsExact) {
    const ShiftSchedule s({{Distribution::power_law(2.0), 100}, {Distribution::power_law(5.0), 50}},
                          Distribution::uniform(), 1000);
    EXPECT_EQ(s.change_point(), 150u);
    EXPECT_EQ(s.distribution_at(1), Distribution::power_law(2.0));
    EXPECT_EQ(s.distribution_at(100), Distribution::power_law(2.0));
    EXPECT_EQ(s.distribution_at(101), Distribution::power_law(5.0));
    EXPECT_EQ(s.distribution_at(150), Distribution::power_law(5.0));
    EXPECT_EQ(s.distribution_at(151), Distribution::uniform());
    EXPECT_THROW(s.distribution_at(0), DomainError);
    EXPECT_THROW(s.distribution_at(1001), DomainError);
    EXPECT_THROW(ShiftSchedule({{Distribution::uniform(), 20}}, Distribution::uniform(), 10), DomainError);
}

TEST(Appendix, PrintedFormulaValues) {
    EXPECT_TRUE(Instance::appendix_mean(2, 0.5).isApprox(Eigen::Vector2d(0.5, 0.5)));
    const auto m1 = Instance::appendix_mean(1, 0.5);
    EXPECT_NEAR(m1(0), 0.0, 1e-12);
    EXPECT_NEAR(m1(1), 0.1, 1e-12);
    const auto m10 = Instance::appendix_mean(10, 0.5);
    EXPECT_NEAR(m10(0), 2.5, 1e-12);
    EXPECT_EQ(m10(1), 0.0);
    EXPECT_THROW(Instance::appendix_mean(0, 0.5), DomainError);
    EXPECT_THROW(Instance::appendix_mean(1, 1.0), DomainError);
}

TEST(Appendix, EnumeratedFront) {
    const auto inst = Instance::appendix(10);
    EXPECT_EQ(inst.oracle_pareto(at(0.5), Cone::orthant(2)).arms, (std::vector<std::size_t>{1, 9}));
    EXPECT_EQ(Instance::appendix(1).oracle_pareto(at(0.3), Cone::orthant(2)).arms, std::vector<std::size_t>{0});
}

TEST(Appendix, IntervalClaimIsOnlyADiagnostic) {
    const auto diag = appendix_interval_diagnostic(10, 0.5, Cone::orthant(2));
    EXPECT_EQ(diag.interval_lo, 2u);
    EXPECT_EQ(diag.interval_hi, 2u);
    EXPECT_EQ(diag.front, (std::vector<std::size_t>{2, 10}));
    EXPECT_FALSE(diag.matches);
}

TEST(Appendix, HolderSpotCheck) {
    const auto inst = Instance::appendix(20);
    const auto [beta, c] = inst.holder();
    Rng rng(9);
    std::uniform_real_distribution<double> u(0.0, 0.9);
    double worst = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double x = u(rng), y = u(rng);
        if (x == y) continue;
        // Skip pairs straddling a point where k2(x) is an integer arm index.
        const double k2x = 5.0 / (5.0 - 4.0 * x), k2y = 5.0 / (5.0 - 4.0 * y);
        if (std::floor(k2x) != std::floor(k2y)) continue;
        for (std::size_t k = 0; k < 20; ++k) {
            const double diff = (inst.mean_reward(k, at(x)) - inst.mean_reward(k, at(y))).cwiseAbs().maxCoeff();
            worst = std::max(worst, diff / std::pow(std::abs(x - y), beta));
        }
    }
    EXPECT_GT(worst, 0.0);
    EXPECT_LE(worst, c * (1.0 + 1e-9));
}

TEST(Appendix, SecondObjectiveJumpsWhereK2CrossesAnArmIndex) {
    // k2(0.625) = 2: arm 2 switches branch and its second mean drops by ~1.
    const double before = Instance::appendix_mean(2, 0.625 - 1e-6)(1);
    const double after = Instance::appendix_mean(2, 0.625 + 1e-6)(1);
    EXPECT_GT(before - after, 0.99);
}

TEST(Instance, OracleFrontNonEmptyAndNonDominated) {
    Rng rng(10);
    std::uniform_real_distribution<double> u(0.0, kContextCeiling);
    const auto inst = Instance::appendix(20);
    for (int i = 0; i < 500; ++i) {
        const Context x = at(u(rng));
        const auto front = inst.oracle_pareto(x, Cone::orthant(2));
        ASSERT_FALSE(front.arms.empty());
        const auto means = inst.all_means(x);
        for (auto a : front.arms) {
            for (std::size_t j = 0; j < means.size(); ++j) EXPECT_FALSE(Cone::orthant(2).dominates(means[j], means[a]));
        }
        for (const auto& m : front.means) EXPECT_GE(m.minCoeff(), kMeanFloor);
    }
}

TEST(Instance, RewardNoise) {
    const auto inst = Instance::appendix(5);
    Rng rng(12);
    EXPECT_TRUE(inst.draw_reward(2, at(0.3), 0.0, rng).isApprox(inst.mean_reward(2, at(0.3))));
    const int n = 100000;
    const double sigma = 0.7;
    RewardVector sum = RewardVector::Zero(2), sq = RewardVector::Zero(2);
    const RewardVector mean = inst.mean_reward(2, at(0.3));
    for (int i = 0; i < n; ++i) {
        const RewardVector r = inst.draw_reward(2, at(0.3), sigma, rng);
        sum += r;
        sq += (r - mean).cwiseProduct(r - mean);
    }
    for (Eigen::Index m = 0; m < 2; ++m) {
        EXPECT_NEAR(sum(m) / n, mean(m), 4.0 * sigma / std::sqrt(static_cast<double>(n)));
        EXPECT_NEAR(sq(m) / n, sigma * sigma, 0.05 * sigma * sigma);
    }
    EXPECT_THROW(inst.draw_reward(2, at(0.3), -1.0, rng), DomainError);
}

TEST(Instance, TableFixedIgnoresContext) {
    ArmMeanTable t = ArmMeanTable::from_means({Eigen::Vector2d(0.8, 0.9), Eigen::Vector2d(0.9, 1.2)});
    const auto inst = Instance::table_fixed(t, 2);
    Context x(2);
    x << 0.1, 0.9;
    EXPECT_TRUE(inst.mean_reward(1, x).isApprox(Eigen::Vector2d(0.9, 1.2)));
    EXPECT_EQ(inst.oracle_pareto(x, Cone::orthant(2)).arms, std::vector<std::size_t>{1});
}

TEST(Instance, HolderMixtureBump) {
    HolderMixture mix;
    mix.beta = 0.5;
    HolderArm arm;
    arm.offset = Eigen::Vector2d(0.5, 0.5);
    arm.bumps.push_back({at(0.5), 0.25, Eigen::Vector2d(0.2, -0.1)});
    mix.arms = {arm, arm};
    const Instance inst{mix};
    EXPECT_TRUE(inst.mean_reward(0, at(0.5)).isApprox(Eigen::Vector2d(0.7, 0.4)));
    EXPECT_TRUE(inst.mean_reward(0, at(0.9)).isApprox(Eigen::Vector2d(0.5, 0.5)));
    EXPECT_EQ(inst.holder().first, 0.5);
}
