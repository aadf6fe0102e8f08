#include <gtest/gtest.h>

#include <random>

#include "ofdm_papr/errors.hpp"
#include "ofdm_papr/papr.hpp"
#include "ofdm_papr/subproblems.hpp"
#include "oracles.hpp"

using namespace ofdm_papr;

namespace {

TimeSymbol random_b(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    TimeSymbol b(n);
    for (auto& v : b) v = {g(rng), g(rng)};
    return b;
}

} // namespace

TEST(ZProjection, ConstantModulusIsNormalized)
{
    const TimeSymbol b{1, 1, 1, 1};
    const auto zp = z_projection(b, 2.0);
    for (const auto& v : zp.z) EXPECT_NEAR(std::abs(v - 0.5), 0.0, 1e-8);
}

TEST(ZProjection, TwoSampleExample)
{
    const auto zp = z_projection(TimeSymbol{2, 1}, 1.2);
    EXPECT_NEAR(zp.z[0].real(), 0.774597, 1e-6);
    EXPECT_NEAR(zp.z[1].real(), 0.632456, 1e-6);
    EXPECT_NEAR(zp.gamma_star, 0.790569, 1e-6);
    EXPECT_NEAR(squared_norm(zp.z), 1.0, 1e-12);
}

TEST(ZProjection, DominatesRandomFeasiblePoints)
{
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 4 + trial % 5;
        const double alpha = 1.0 + 0.3 * (trial % 7);
        const auto b = random_b(n, rng);
        const auto zp = z_projection(b, alpha);
        const double cap = papr_cap(alpha, n);
        const double best = oracle::z_objective(zp.z, b);
        for (int i = 0; i < 1000; ++i)
            ASSERT_GE(best, oracle::z_objective(oracle::random_feasible_z(n, cap, rng), b) - 1e-12);
    }
}

TEST(ZProjection, MatchesEnumerationOracleAndIsTight)
{
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = 2 + i % 3; // lN <= 4
        const double alpha = 1.0 + (static_cast<double>(n) - 1.0) * u(rng);
        const auto b = random_b(n, rng);
        const auto zp = z_projection(b, alpha);
        const double cap = papr_cap(alpha, n);
        EXPECT_TRUE(oracle::z_feasible(zp.z, cap, 1e-8));
        EXPECT_NEAR(oracle::z_objective(zp.z, b), oracle::z_brute_value(b, cap), 1e-5);
        EXPECT_NEAR(squared_norm(zp.z), 1.0, 1e-6);
    }
}

TEST(ZProjection, EnergyMonotoneInGamma)
{
    std::mt19937_64 rng(33);
    const auto b = random_b(64, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double g = 0.01; g < 50.0; g *= 1.1) {
        const double e = z_energy(b, 2.5, g);
        EXPECT_LE(e, prev + 1e-15);
        prev = e;
    }
}

TEST(ZProjection, CapRespected)
{
    std::mt19937_64 rng(34);
    for (int i = 0; i < 50; ++i) {
        const auto b = random_b(256, rng);
        const auto zp = z_projection(b, db_to_linear(4.0));
        for (const auto& v : zp.z) EXPECT_LE(std::norm(v), db_to_linear(4.0) / 256.0 + 1e-12);
        EXPECT_NEAR(squared_norm(zp.z), 1.0, 1e-8);
    }
}

TEST(ZProjection, ZeroInputIsDegenerate)
{
    const auto zp = z_projection(TimeSymbol(8), 2.0);
    EXPECT_TRUE(zp.degenerate);
    const auto xu = x_update(TimeSymbol(8), 2.0);
    EXPECT_TRUE(xu.degenerate);
    EXPECT_EQ(squared_norm(xu.x_next), 0.0);
}

TEST(ZProjection, ZeroEntriesTakeLeftoverEnergy)
{
    // Two nonzero entries at the cap leave energy for the zeros.
    const TimeSymbol b{3, 0, 0, {0, 1}};
    const auto zp = z_projection(b, 1.5);
    const double cap = papr_cap(1.5, 4);
    EXPECT_NEAR(std::abs(zp.z[0]), cap, 1e-12);
    EXPECT_NEAR(std::abs(zp.z[3]), cap, 1e-12);
    EXPECT_NEAR(squared_norm(zp.z), 1.0, 1e-12);
    EXPECT_NEAR(oracle::z_objective(zp.z, b), oracle::z_brute_value(b, cap), 1e-9);
}

TEST(ZProjection, BracketFailureReported)
{
    BisectionConfig cfg;
    cfg.gamma_right0 = 1e-6;
    cfg.max_expansions = 2;
    std::mt19937_64 rng(35);
    EXPECT_THROW(z_projection(random_b(16, rng), 2.0, cfg), numerical_failure);
}

TEST(ZProjection, RejectsBadConfig)
{
    BisectionConfig cfg;
    cfg.gamma_left0 = 5.0;
    cfg.gamma_right0 = 1.0;
    EXPECT_THROW(z_projection(TimeSymbol{1, 2}, 1.5, cfg), std::invalid_argument);
    EXPECT_THROW(z_projection(TimeSymbol{1, 2}, 0.5), std::invalid_argument);
}

TEST(XUpdate, FeasiblePointIsFixed)
{
    const TimeSymbol b{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    const auto xu = x_update(b, 2.0);
    EXPECT_LT(oracle::max_abs_diff(xu.x_next, b), 1e-7);
}

TEST(XUpdate, TwoSampleExample)
{
    const auto xu = x_update(TimeSymbol{2, 1}, 1.2);
    EXPECT_NEAR(xu.t, 2.0 * std::sqrt(0.6) + std::sqrt(0.4), 1e-9);
    EXPECT_NEAR(xu.t, 2.181649, 1e-6);
    EXPECT_NEAR(xu.x_next[0].real(), 1.689898, 1e-6);
    EXPECT_NEAR(xu.x_next[1].real(), 1.379796, 1e-6);
    EXPECT_NEAR(papr(xu.x_next), 1.2, 1e-9);
}

TEST(XUpdate, PositiveScalingEquivariance)
{
    std::mt19937_64 rng(36);
    const auto b = random_b(32, rng);
    const auto a = x_update(b, 2.0);
    const auto s = x_update(b * 3.7, 2.0);
    EXPECT_LT(oracle::max_abs_diff(s.x_next, a.x_next * 3.7), 1e-8);
}

TEST(XUpdate, PaprWithinTarget)
{
    std::mt19937_64 rng(37);
    for (int i = 0; i < 50; ++i) {
        const auto xu = x_update(random_b(256, rng), db_to_linear(4.0));
        EXPECT_LE(papr(xu.x_next), db_to_linear(4.0) * (1.0 + 1e-7));
        EXPECT_GE(xu.t, 0.0);
        EXPECT_LT(oracle::max_abs_diff(xu.x_next, xu.z * xu.t), 1e-15);
    }
}
