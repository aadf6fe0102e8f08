#include <gtest/gtest.h>

#include "ofdm_papr/channel.hpp"
#include "ofdm_papr/constellation.hpp"
#include "ofdm_papr/transform.hpp"
#include "oracles.hpp"

using namespace ofdm_papr;

TEST(Sspa, LinearRegion)
{
    const double a_sat = 1.0;
    for (double a : {1e-3, 1e-2, 0.1}) {
        const double rel = std::abs(rapp_gain(a, a_sat, 3.0) - a) / a;
        EXPECT_LT(rel, std::pow(a / a_sat, 6.0));
    }
}

TEST(Sspa, SaturationLimitAndKnee)
{
    EXPECT_NEAR(rapp_gain(1e6, 2.0, 3.0), 2.0, 1e-9);
    EXPECT_NEAR(rapp_gain(2.0, 2.0, 3.0), 0.890899 * 2.0, 1e-6);
    EXPECT_NEAR(rapp_gain(2.0, 2.0, 3.0), 2.0 / std::pow(2.0, 1.0 / 6.0), 1e-15);
}

TEST(Sspa, MonotonePhasePreservingBounded)
{
    TimeSymbol x;
    double prev = 0.0;
    for (double a = 0.0; a < 10.0; a += 0.01) {
        const double g = rapp_gain(a, 1.3, 3.0);
        EXPECT_GE(g, prev);
        EXPECT_LE(g, 1.3);
        prev = g;
    }
    const TimeSymbol in{{0.3, -2.0}, {-1.0, 0.1}, 0.0};
    const auto out = sspa(in, 1.0, 3.0);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(std::arg(out[i]), std::arg(in[i]), 1e-15);
    EXPECT_EQ(out[2], cplx(0.0, 0.0));
    EXPECT_THROW(sspa(in, 0.0, 3.0), std::invalid_argument);
}

TEST(Sspa, SaturationFromBackoff)
{
    const SspaParams p{3.0, 4.1};
    EXPECT_NEAR(p.saturation_amplitude(2.0) * p.saturation_amplitude(2.0) / 2.0, std::pow(10.0, 0.41), 1e-12);
}

TEST(Awgn, ZeroVarianceIsIdentity)
{
    auto rng = symbol_stream(1, stream::noise, 0);
    const TimeSymbol x{1, 2, 3};
    EXPECT_EQ(add_noise(x, 0.0, rng), x);
    EXPECT_EQ(awgn(x, 1e9, 1.0, rng), x);
}

TEST(Awgn, EmpiricalVariance)
{
    auto rng = symbol_stream(2, stream::noise, 0);
    const TimeSymbol x(1'000'000);
    const auto y = add_noise(x, 0.37, rng);
    EXPECT_NEAR(squared_norm(y) / 1e6, 0.37, 0.02 * 0.37);
}

TEST(Awgn, NoiseVarianceFormula)
{
    EXPECT_DOUBLE_EQ(noise_variance(10.0, 2.0, 256), 2.0 / (256.0 * 10.0));
    EXPECT_DOUBLE_EQ(energy_per_bit(52.0, 52, 4), 0.25);
    EXPECT_THROW(noise_variance(0.0, 0.0, 4), std::invalid_argument);
}

TEST(Awgn, IdealQpskMatchesQFunction)
{
    const auto plan = CarrierPlan::wifi_default();
    const Constellation con(Modulation::qpsk);
    const auto& tf = cached_transform(64, 4);
    for (double ebn0 : {0.0, 4.0, 6.0}) {
        std::size_t errors = 0, bits = 0;
        const double eb = energy_per_bit(static_cast<double>(plan.n_data()), plan.n_data(), 2);
        const double var = noise_variance(ebn0, eb, tf.time_length());
        for (std::uint64_t i = 0; i < 4000; ++i) {
            auto brng = symbol_stream(3, stream::bits, i);
            const auto tx = random_bits(brng, plan.n_data() * 2);
            auto nrng = symbol_stream(3, stream::noise, i);
            const auto y = add_noise(tf.ifft(map_bits(tx, con, plan)), var, nrng);
            const auto rx = demap_bits(tf.fft(y), con, plan);
            for (std::size_t b = 0; b < tx.size(); ++b) errors += tx[b] != rx[b];
            bits += tx.size();
        }
        const double p = oracle::qpsk_ber(ebn0);
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
        EXPECT_NEAR(static_cast<double>(errors) / static_cast<double>(bits), p, 3.0 * sigma) << ebn0;
    }
}

TEST(Multipath, DefaultOffsets)
{
    EXPECT_EQ(MultipathProfile{}.sample_offsets(4), (std::vector<std::size_t>{0, 15, 24, 32}));
    const MultipathChannel ch(MultipathProfile{}, 64, 4, 64);
    EXPECT_EQ(ch.offsets(), (std::vector<std::size_t>{0, 15, 24, 32}));
}

TEST(Multipath, SingleTapIsIdentity)
{
    MultipathProfile single;
    single.taps = {{0.0, 1.0}};
    const MultipathChannel ch(single, 8, 2, 4);
    const TimeSymbol x{1, 2, 3, 4, {0, 1}, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    EXPECT_EQ(ch.apply(x), x);
}

TEST(Multipath, ZeroForcingRestoresSymbol)
{
    MultipathProfile two;
    two.taps = {{0.0, 1.0}, {50.0, 0.5}};
    const auto plan = CarrierPlan::wifi_default();
    const Constellation con(Modulation::qam16);
    const MultipathChannel ch(two, 64, 4, 16);
    auto rng = symbol_stream(4, stream::bits, 0);
    const auto c = map_bits(random_bits(rng, plan.n_data() * 4), con, plan);
    const auto& tf = cached_transform(64, 4);
    const auto rx = zf_equalize(tf.fft(ch.apply(tf.ifft(c))), ch.response());
    EXPECT_LT(oracle::max_abs_diff(rx, c), 1e-10);

    const MultipathChannel def(MultipathProfile{}, 64, 4, 64);
    const auto rx2 = zf_equalize(tf.fft(def.apply(tf.ifft(c))), def.response());
    EXPECT_LT(oracle::max_abs_diff(rx2, c), 1e-10);
}

TEST(Multipath, ShortPrefixRejected)
{
    EXPECT_THROW(MultipathChannel(MultipathProfile{}, 64, 4, 16), std::invalid_argument);
    MultipathProfile bad;
    bad.taps = {{10.0, 1.0}};
    EXPECT_THROW(MultipathChannel(bad, 64, 4, 64), std::invalid_argument);
}
