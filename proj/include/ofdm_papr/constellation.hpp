#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "carrier_plan.hpp"
#include "signal.hpp"

namespace ofdm_papr {

enum class Modulation { qpsk, qam16 };

inline std::string_view to_string(Modulation m)
{
    return m == Modulation::qpsk ? "qpsk" : "qam16";
}

inline Modulation parse_modulation(std::string_view s)
{
    if (s == "qpsk" || s == "QPSK") return Modulation::qpsk;
    if (s == "qam16" || s == "16qam" || s == "16-QAM" || s == "QAM16") return Modulation::qam16;
    throw std::invalid_argument("unknown modulation '" + std::string(s) + "'");
}

// Gray-mapped square constellation with unit average energy.
//
// Each axis carries a (sign, magnitude) bit group: the sign bit is 0 for the
// positive half-plane, the magnitude bit (16-QAM only) is 0 for the inner
// level. Per axis the levels read -3:11 -1:10 +1:00 +3:01, so neighbours
// differ in exactly one bit. Bit order is I-group then Q-group, MSB first.
class Constellation {
public:
    explicit Constellation(Modulation kind) : kind_(kind)
    {
        const unsigned n = 1u << bits_per_symbol();
        points_.resize(n);
        for (unsigned p = 0; p < n; ++p) points_[p] = point_for(p);
    }

    Modulation kind() const noexcept { return kind_; }
    unsigned bits_per_symbol() const noexcept { return kind_ == Modulation::qpsk ? 2 : 4; }
    const std::vector<cplx>& points() const noexcept { return points_; }

    cplx map(unsigned pattern) const { return points_.at(pattern); }

    // Minimum-distance hard decision.
    unsigned decide(cplx y) const noexcept
    {
        unsigned best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (unsigned p = 0; p < points_.size(); ++p) {
            const double d = std::norm(y - points_[p]);
            if (d < best_d) {
                best_d = d;
                best = p;
            }
        }
        return best;
    }

private:
    cplx point_for(unsigned pattern) const
    {
        if (kind_ == Modulation::qpsk) {
            const double s = 1.0 / std::sqrt(2.0);
            const double i = (pattern & 0b10) ? -s : s;
            const double q = (pattern & 0b01) ? -s : s;
            return {i, q};
        }
        const double s = 1.0 / std::sqrt(10.0);
        auto level = [s](unsigned sign, unsigned mag) {
            return (sign ? -1.0 : 1.0) * (mag ? 3.0 : 1.0) * s;
        };
        return {level((pattern >> 3) & 1u, (pattern >> 2) & 1u), level((pattern >> 1) & 1u, pattern & 1u)};
    }

    Modulation kind_;
    std::vector<cplx> points_;
};

// Places Gray-mapped points on the data carriers in index order; free carriers
// stay exactly zero.
inline FreqSymbol map_bits(std::span<const std::uint8_t> bits, const Constellation& constellation,
                           const CarrierPlan& plan)
{
    const unsigned bps = constellation.bits_per_symbol();
    if (bits.size() != plan.n_data() * bps)
        throw std::invalid_argument("map_bits: expected " + std::to_string(plan.n_data() * bps) +
                                    " bits, got " + std::to_string(bits.size()));
    FreqSymbol c(plan.n_carriers());
    std::size_t pos = 0;
    for (auto k : plan.data_indices()) {
        unsigned pattern = 0;
        for (unsigned b = 0; b < bps; ++b) pattern = (pattern << 1) | (bits[pos++] & 1u);
        c[k] = constellation.map(pattern);
    }
    return c;
}

inline std::vector<std::uint8_t> demap_bits(const FreqSymbol& c, const Constellation& constellation,
                                            const CarrierPlan& plan)
{
    if (c.size() != plan.n_carriers()) throw std::invalid_argument("demap_bits: symbol length mismatch");
    const unsigned bps = constellation.bits_per_symbol();
    std::vector<std::uint8_t> bits;
    bits.reserve(plan.n_data() * bps);
    for (auto k : plan.data_indices()) {
        const unsigned pattern = constellation.decide(c[k]);
        for (int b = static_cast<int>(bps) - 1; b >= 0; --b) bits.push_back((pattern >> b) & 1u);
    }
    return bits;
}

} // namespace ofdm_papr
