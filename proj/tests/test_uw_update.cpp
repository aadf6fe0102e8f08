#include <gtest/gtest.h>

#include <random>

#include "ofdm_papr/subproblems.hpp"
#include "oracles.hpp"

using namespace ofdm_papr;

namespace {

TimeSymbol random_t(std::size_t n, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    TimeSymbol b(n);
    for (auto& v : b) v = {g(rng), g(rng)};
    return b;
}

} // namespace

TEST(UwUpdate, ConsensusIsFixed)
{
    std::mt19937_64 rng(41);
    const auto v = random_t(16, rng);
    const TimeSymbol zero(16);
    const auto uw = uw_update(v, v, zero, zero, 300.0, 100.0);
    EXPECT_LT(oracle::max_abs_diff(uw.u, v), 1e-14);
    EXPECT_LT(oracle::max_abs_diff(uw.w, v), 1e-14);
}

TEST(UwUpdate, StationarityAndMultiplierIdentity)
{
    std::mt19937_64 rng(42);
    for (int i = 0; i < 100; ++i) {
        const double rho = 300.0, rt = 100.0;
        const auto x = random_t(32, rng), ac = random_t(32, rng), y1 = random_t(32, rng), y2 = random_t(32, rng);
        const auto uw = uw_update(x, ac, y1, y2, rho, rt);
        const auto d = uw.u - uw.w;
        const auto g1 = y1 * -1.0 + d * rt - (ac - uw.u) * rho;
        const auto g2 = y2 * -1.0 - d * rt - (x - uw.w) * rho;
        EXPECT_LE(norm2(g1), 1e-10);
        EXPECT_LE(norm2(g2), 1e-10);
        const auto y1n = y1 + (ac - uw.u) * rho;
        const auto y2n = y2 + (x - uw.w) * rho;
        EXPECT_LE(norm_inf(y1n - d * rt), 1e-10);
        EXPECT_LE(norm_inf(y2n + d * rt), 1e-10);
    }
}

TEST(UwUpdate, ReducesToPrintedFormWhenMultipliersOppose)
{
    std::mt19937_64 rng(43);
    const double rho = 300.0, rt = 100.0;
    const auto x = random_t(16, rng), ac = random_t(16, rng), y1 = random_t(16, rng);
    const auto y2 = y1 * -1.0;
    const auto uw = uw_update(x, ac, y1, y2, rho, rt);
    const auto u = (y1 + x * rt + ac * (rho + rt)) / (2.0 * rt + rho);
    const auto w = (y2 + x * (rt + rho) + ac * rt) / (2.0 * rt + rho);
    EXPECT_LT(oracle::max_abs_diff(uw.u, u), 1e-13);
    EXPECT_LT(oracle::max_abs_diff(uw.w, w), 1e-13);
}

TEST(UwUpdate, RejectsNonPositivePenalties)
{
    const TimeSymbol z(4);
    EXPECT_THROW(uw_update(z, z, z, z, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(uw_update(z, z, z, z, 1.0, 0.0), std::invalid_argument);
}
