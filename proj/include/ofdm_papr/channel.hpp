#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rng.hpp"
#include "signal.hpp"

namespace ofdm_papr {

// ---------------------------------------------------------------------------
// Rapp solid-state amplifier
// ---------------------------------------------------------------------------

struct SspaParams {
    double smoothing_p = 3.0;
    double input_backoff_db = 4.1;

    void validate() const
    {
        if (!(smoothing_p > 0.0)) throw std::invalid_argument("sspa: smoothing factor must be > 0");
    }

    // a_sat^2 / mean input power = 10^(IBO/10)
    double saturation_amplitude(double mean_input_power) const
    {
        if (!(mean_input_power > 0.0)) throw std::invalid_argument("sspa: mean input power must be > 0");
        return std::sqrt(mean_input_power * std::pow(10.0, input_backoff_db / 10.0));
    }
};

inline double rapp_gain(double amplitude, double a_sat, double p)
{
    return amplitude / std::pow(1.0 + std::pow(amplitude / a_sat, 2.0 * p), 1.0 / (2.0 * p));
}

inline TimeSymbol sspa(TimeSymbol x, double a_sat, double p)
{
    if (!(a_sat > 0.0)) throw std::invalid_argument("sspa: a_sat must be > 0");
    for (auto& v : x) {
        const double m = std::abs(v);
        if (m > 0.0) v *= rapp_gain(m, a_sat, p) / m;
    }
    return x;
}

// ---------------------------------------------------------------------------
// AWGN
//
// The receiver takes the lN-point FFT, so white noise of per-sample variance
// s2 lands on each carrier with variance lN * s2. Matching Eb/N0 per data
// carrier gives s2 = Eb / (lN * 10^(EbN0/10)).
// ---------------------------------------------------------------------------

inline double noise_variance(double ebn0_db, double eb, std::size_t time_length)
{
    if (!(eb > 0.0)) throw std::invalid_argument("awgn: Eb must be > 0");
    return eb / (static_cast<double>(time_length) * std::pow(10.0, ebn0_db / 10.0));
}

// Eb from the mean carrier energy of the transmitted symbols:
// Es / (M * bits_per_symbol).
inline double energy_per_bit(double mean_symbol_energy, std::size_t n_data, unsigned bits_per_symbol)
{
    return mean_symbol_energy / static_cast<double>(n_data * bits_per_symbol);
}

inline TimeSymbol add_noise(TimeSymbol x, double variance, std::mt19937_64& rng)
{
    if (variance <= 0.0) return x;
    for (auto& v : x) v += complex_gaussian(rng, variance);
    return x;
}

inline TimeSymbol awgn(TimeSymbol x, double ebn0_db, double eb, std::mt19937_64& rng)
{
    const double var = noise_variance(ebn0_db, eb, x.size());
    return add_noise(std::move(x), var, rng);
}

// ---------------------------------------------------------------------------
// Multipath
// ---------------------------------------------------------------------------

struct Tap {
    double delay_ns;
    double gain; // linear amplitude
};

struct MultipathProfile {
    std::vector<Tap> taps{{0.0, 1.0}, {190.0, 0.2}, {300.0, 0.07}, {400.0, 0.05}};
    double native_rate_hz = 20e6;

    void validate() const
    {
        if (taps.empty() || taps.front().delay_ns != 0.0 || taps.front().gain != 1.0)
            throw std::invalid_argument("multipath: first tap must be (0, 1)");
        for (const auto& t : taps)
            if (!(t.gain >= 0.0) || !(t.delay_ns >= 0.0))
                throw std::invalid_argument("multipath: taps need non-negative delay and gain");
    }

    std::vector<std::size_t> sample_offsets(std::size_t oversampling) const
    {
        const double rate = native_rate_hz * static_cast<double>(oversampling);
        std::vector<std::size_t> out;
        for (const auto& t : taps) out.push_back(static_cast<std::size_t>(std::lround(t.delay_ns * rate / 1e9)));
        return out;
    }
};

class MultipathChannel {
public:
    MultipathChannel(MultipathProfile profile, std::size_t n_carriers, std::size_t oversampling,
                     std::size_t cp_len = 64)
        : profile_(std::move(profile)), len_(n_carriers * oversampling), cp_(cp_len)
    {
        profile_.validate();
        offsets_ = profile_.sample_offsets(oversampling);
        for (auto d : offsets_)
            if (d > cp_)
                throw std::invalid_argument("multipath: cyclic prefix (" + std::to_string(cp_) +
                                            ") shorter than channel delay (" + std::to_string(d) + ")");
        response_.resize(n_carriers);
        for (std::size_t k = 0; k < n_carriers; ++k) {
            cplx h = 0.0;
            for (std::size_t t = 0; t < offsets_.size(); ++t)
                h += profile_.taps[t].gain *
                     std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * offsets_[t]) /
                                         static_cast<double>(len_));
            response_[k] = h;
        }
    }

    const std::vector<std::size_t>& offsets() const noexcept { return offsets_; }
    // Channel DFT on the N carrier bins.
    const std::vector<cplx>& response() const noexcept { return response_; }

    // Cyclic prefix, FIR, prefix removal.
    TimeSymbol apply(const TimeSymbol& x) const
    {
        if (x.size() != len_) throw std::invalid_argument("multipath: sample count mismatch");
        std::vector<cplx> framed(cp_ + len_);
        for (std::size_t i = 0; i < cp_; ++i) framed[i] = x[len_ - cp_ + i];
        for (std::size_t i = 0; i < len_; ++i) framed[cp_ + i] = x[i];
        TimeSymbol y(len_);
        for (std::size_t n = 0; n < len_; ++n) {
            cplx acc = 0.0;
            for (std::size_t t = 0; t < offsets_.size(); ++t)
                acc += profile_.taps[t].gain * framed[cp_ + n - offsets_[t]];
            y[n] = acc;
        }
        return y;
    }

private:
    MultipathProfile profile_;
    std::size_t len_;
    std::size_t cp_;
    std::vector<std::size_t> offsets_;
    std::vector<cplx> response_;
};

// One-tap zero-forcing with perfect channel knowledge.
inline FreqSymbol zf_equalize(FreqSymbol c, const std::vector<cplx>& response)
{
    if (c.size() != response.size()) throw std::invalid_argument("equalizer: response length mismatch");
    for (std::size_t k = 0; k < c.size(); ++k) c[k] /= response[k];
    return c;
}

} // namespace ofdm_papr
