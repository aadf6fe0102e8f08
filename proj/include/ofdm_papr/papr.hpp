#pragma once

#include <cmath>

#include "errors.hpp"
#include "signal.hpp"

namespace ofdm_papr {

// ||x||_inf^2 / ((1/lN) ||x||_2^2), linear.
inline double papr(const TimeSymbol& x)
{
    const double energy = squared_norm(x);
    if (!(energy > 0.0)) throw degenerate_input("papr: zero-energy symbol");
    const double peak = norm_inf(x);
    return peak * peak * static_cast<double>(x.size()) / energy;
}

inline double papr_db(const TimeSymbol& x) { return 10.0 * std::log10(papr(x)); }

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace ofdm_papr
