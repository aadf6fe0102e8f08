#include <gtest/gtest.h>

#include <random>

#include "ofdm_papr/errors.hpp"
#include "ofdm_papr/subproblems.hpp"
#include "oracles.hpp"

using namespace ofdm_papr;

TEST(CUpdate, InactiveConstraint)
{
    const CarrierPlan plan(2, {1});
    const auto res = c_update(FreqSymbol{2, 0}, plan, 0.15, 25.0);
    EXPECT_EQ(res.mu_star, 0.0);
    EXPECT_NEAR(std::abs(res.c_next[0] - 2.0 / 26.0), 0.0, 1e-15);
    EXPECT_EQ(res.c_next[1], cplx(0.0, 0.0));
}

TEST(CUpdate, ActiveConstraintOnBoundary)
{
    const CarrierPlan plan(2, {1});
    const auto res = c_update(FreqSymbol{1, 1}, plan, 1.0, 1.0);
    EXPECT_NEAR(res.mu_star, 0.25, 1e-15);
    EXPECT_NEAR(std::abs(res.c_next[0] - 2.0 / 3.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(res.c_next[1] - 2.0 / 3.0), 0.0, 1e-15);
    EXPECT_NEAR(plan.free_energy(res.c_next), plan.data_energy(res.c_next), 1e-15);
}

TEST(CUpdate, ZeroBetaPinsFreeCarriers)
{
    const CarrierPlan plan(4, {0, 3});
    const FreqSymbol v{{1, 2}, {3, -1}, {0.5, 0.5}, {7, 7}};
    const auto res = c_update(v, plan, 0.0, 0.5);
    EXPECT_TRUE(std::isinf(res.mu_star));
    EXPECT_EQ(res.c_next[0], cplx(0.0, 0.0));
    EXPECT_EQ(res.c_next[3], cplx(0.0, 0.0));
    EXPECT_NEAR(std::abs(res.c_next[1] - v[1] / 1.5), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(res.c_next[2] - v[2] / 1.5), 0.0, 1e-15);
}

TEST(CUpdate, RejectsBadInput)
{
    const CarrierPlan plan(2, {1});
    EXPECT_THROW(c_update(FreqSymbol(2), plan, 0.1, 1.0), degenerate_input);
    EXPECT_THROW(c_update(FreqSymbol{0, 1}, plan, 0.1, 1.0), degenerate_input);
    EXPECT_THROW(c_update(FreqSymbol{1, 1}, plan, -0.1, 1.0), std::invalid_argument);
    EXPECT_THROW(c_update(FreqSymbol{1, 1}, plan, 0.1, 0.0), std::invalid_argument);
    EXPECT_THROW(c_update(FreqSymbol{1, 1, 1}, plan, 0.1, 1.0), std::invalid_argument);
}

TEST(CUpdate, FeasibleWithSlackness)
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.01, 2.0);
    const auto plan = CarrierPlan::with_free_count(8, 3);
    for (int i = 0; i < 200; ++i) {
        FreqSymbol v(8);
        for (auto& x : v) x = {g(rng), g(rng)};
        const double beta = u(rng), r = u(rng);
        const auto res = c_update(v, plan, beta, r);
        const double ef = plan.free_energy(res.c_next), ed = plan.data_energy(res.c_next);
        EXPECT_LE(ef, beta * ed + 1e-9);
        EXPECT_GE(res.mu_star, 0.0);
        EXPECT_LE(std::abs(res.mu_star * (ef - beta * ed)), 1e-6 * (1.0 + ed));
    }
}

TEST(CUpdate, BeatsRandomFeasiblePerturbations)
{
    std::mt19937_64 rng(22);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 2 + i % 7;
        const auto plan = CarrierPlan::with_free_count(n, 1 + i % (n - 1));
        FreqSymbol v(n);
        for (auto& x : v) x = {g(rng), g(rng)};
        const double beta = u(rng), r = 3.0 * u(rng);
        const auto res = c_update(v, plan, beta, r);
        const double best = oracle::c_objective(res.c_next, v, plan, r);
        int tried = 0;
        while (tried < 1000) {
            FreqSymbol c = res.c_next;
            for (auto& x : c) x += cplx(g(rng), g(rng)) * 0.1;
            if (!oracle::c_feasible(c, plan, beta, 0.0)) continue;
            ++tried;
            ASSERT_GE(oracle::c_objective(c, v, plan, r), best - 1e-12);
        }
    }
}

TEST(CUpdate, MatchesBruteForce)
{
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 2 + i % 3;
        const auto plan = CarrierPlan::with_free_count(n, 1);
        FreqSymbol v(n);
        for (auto& x : v) x = {g(rng), g(rng)};
        const double beta = i % 10 == 0 ? 0.0 : u(rng);
        const double r = 0.05 + 2.0 * u(rng);
        const auto res = c_update(v, plan, beta, r);
        const auto ref = oracle::c_update_brute(v, plan, beta, r);
        EXPECT_NEAR(oracle::c_objective(res.c_next, v, plan, r), ref.value, 1e-5) << i;
    }
}
