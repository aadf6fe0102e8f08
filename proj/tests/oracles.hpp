#pragma once

// Slow, independent reference implementations used only by the tests.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "ofdm_papr/carrier_plan.hpp"
#include "ofdm_papr/signal.hpp"

namespace oracle {

using ofdm_papr::cplx;
using ofdm_papr::FreqSymbol;
using ofdm_papr::TimeSymbol;

// A[n][k] = exp(j 2 pi n k / (lN)) / (lN), n < lN, k < N.
inline std::vector<std::vector<cplx>> dense_a(std::size_t n, std::size_t ell)
{
    const std::size_t len = n * ell;
    std::vector<std::vector<cplx>> a(len, std::vector<cplx>(n));
    for (std::size_t r = 0; r < len; ++r)
        for (std::size_t k = 0; k < n; ++k) {
            const double ph = 2.0 * std::numbers::pi * static_cast<double>((r * k) % len) / static_cast<double>(len);
            a[r][k] = std::polar(1.0, ph) / static_cast<double>(len);
        }
    return a;
}

inline TimeSymbol dense_ifft(const FreqSymbol& c, std::size_t ell)
{
    const auto a = dense_a(c.size(), ell);
    TimeSymbol x(a.size());
    for (std::size_t r = 0; r < a.size(); ++r)
        for (std::size_t k = 0; k < c.size(); ++k) x[r] += a[r][k] * c[k];
    return x;
}

// lN A^H x
inline FreqSymbol dense_fft(const TimeSymbol& x, std::size_t n)
{
    const std::size_t ell = x.size() / n;
    const auto a = dense_a(n, ell);
    FreqSymbol c(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t r = 0; r < x.size(); ++r) c[k] += std::conj(a[r][k]) * x[r];
    for (auto& v : c) v *= static_cast<double>(x.size());
    return c;
}

inline double max_abs_diff(const auto& a, const auto& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// ---------------------------------------------------------------------------
// c-update: 1/2||S_D c||^2 + r/2||c||^2 - Re(v^H c) over ||S_F c||^2 <= beta ||S_D c||^2.
// ---------------------------------------------------------------------------

inline double c_objective(const FreqSymbol& c, const FreqSymbol& v, const ofdm_papr::CarrierPlan& plan, double r)
{
    double f = 0.5 * plan.data_energy(c) + 0.5 * r * ofdm_papr::squared_norm(c);
    for (std::size_t k = 0; k < c.size(); ++k) f -= (std::conj(v[k]) * c[k]).real();
    return f;
}

inline bool c_feasible(const FreqSymbol& c, const ofdm_papr::CarrierPlan& plan, double beta, double slack = 1e-9)
{
    return plan.free_energy(c) <= beta * plan.data_energy(c) + slack;
}

// For fixed block norms a = ||c_D||, f = ||c_F|| the best phases align c
// with v, so the problem reduces to
//   min (1+r)/2 a^2 + r/2 f^2 - a ||v_D|| - f ||v_F||,  0 <= f <= sqrt(beta) a.
// For fixed a the best f is a clamp; the remaining 1D problem is convex and
// is solved by golden-section search.
struct CBrute {
    FreqSymbol c;
    double value;
};

inline CBrute c_update_brute(const FreqSymbol& v, const ofdm_papr::CarrierPlan& plan, double beta, double r)
{
    const double nd = std::sqrt(plan.data_energy(v));
    const double nf = std::sqrt(plan.free_energy(v));
    const double sb = std::sqrt(beta);
    auto best_f = [&](double a) { return std::clamp(nf / r, 0.0, sb * a); };
    auto h = [&](double a) {
        const double f = best_f(a);
        return 0.5 * (1.0 + r) * a * a + 0.5 * r * f * f - a * nd - f * nf;
    };
    double lo = 0.0, hi = (nd + sb * nf) / r + 1.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double m1 = hi - phi * (hi - lo), m2 = lo + phi * (hi - lo);
    double h1 = h(m1), h2 = h(m2);
    for (int it = 0; it < 200; ++it) {
        if (h1 < h2) {
            hi = m2;
            m2 = m1;
            h2 = h1;
            m1 = hi - phi * (hi - lo);
            h1 = h(m1);
        } else {
            lo = m1;
            m1 = m2;
            h1 = h2;
            m2 = lo + phi * (hi - lo);
            h2 = h(m2);
        }
    }
    const double a = 0.5 * (lo + hi);
    const double f = best_f(a);
    FreqSymbol c(v.size());
    for (auto k : plan.data_indices()) c[k] = nd > 0.0 ? v[k] / nd * a : 0.0;
    for (auto k : plan.free_indices()) c[k] = nf > 0.0 ? v[k] / nf * f : 0.0;
    return {c, c_objective(c, v, plan, r)};
}

// ---------------------------------------------------------------------------
// z-projection: max Re(z^H b) over ||z||^2 <= 1, |z_i| <= cap.
// ---------------------------------------------------------------------------

inline double z_objective(const TimeSymbol& z, const TimeSymbol& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += (std::conj(z[i]) * b[i]).real();
    return s;
}

inline bool z_feasible(const TimeSymbol& z, double cap, double tol = 1e-9)
{
    if (ofdm_papr::squared_norm(z) > 1.0 + tol) return false;
    for (const auto& v : z)
        if (std::abs(v) > cap * (1.0 + tol)) return false;
    return true;
}

// Enumerates every clip set S. Entries in S sit at the cap with b's phase;
// the rest are proportional to b and absorb the remaining energy. Keeps the
// best feasible candidate. Exponential in the length; meant for lN <= 8.
inline double z_brute_value(const TimeSymbol& b, double cap)
{
    const std::size_t n = b.size();
    double best = -std::numeric_limits<double>::infinity();
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        TimeSymbol z(n);
        double rest_energy = 0.0;
        std::size_t clipped = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                const double m = std::abs(b[i]);
                z[i] = cap * (m > 0.0 ? b[i] / m : cplx(1.0, 0.0));
                ++clipped;
            } else {
                rest_energy += std::norm(b[i]);
            }
        }
        const double room = 1.0 - static_cast<double>(clipped) * cap * cap;
        if (room < -1e-12) continue;
        if (rest_energy > 0.0) {
            const double s = std::sqrt(std::max(0.0, room) / rest_energy);
            for (std::size_t i = 0; i < n; ++i)
                if (!(mask & (1u << i))) z[i] = b[i] * s;
        }
        if (!z_feasible(z, cap, 1e-12)) continue;
        best = std::max(best, z_objective(z, b));
    }
    return best;
}

// Uniformly random point of the feasible set (rejection from the cap box).
inline TimeSymbol random_feasible_z(std::size_t n, double cap, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        TimeSymbol z(n);
        for (auto& v : z) {
            cplx p;
            do p = {u(rng), u(rng)};
            while (std::abs(p) > 1.0);
            v = p * cap;
        }
        if (ofdm_papr::squared_norm(z) <= 1.0) return z;
    }
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

inline double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Gray-mapped QPSK over AWGN.
inline double qpsk_ber(double ebn0_db) { return q_function(std::sqrt(2.0 * std::pow(10.0, ebn0_db / 10.0))); }

} // namespace oracle
