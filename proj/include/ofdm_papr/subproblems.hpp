#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "carrier_plan.hpp"
#include "errors.hpp"
#include "signal.hpp"

namespace ofdm_papr {

// ---------------------------------------------------------------------------
// c-update
//
//   minimize   1/2 ||S_D c||^2 + r/2 ||c||^2 - Re(v^H c)
//   subject to ||S_F c||^2 <= beta ||S_D c||^2
// ---------------------------------------------------------------------------

struct CUpdateResult {
    FreqSymbol c_next;
    double mu_star = 0.0; // +inf when beta == 0
};

inline CUpdateResult c_update(const FreqSymbol& v, const CarrierPlan& plan, double beta, double r)
{
    if (v.size() != plan.n_carriers()) throw std::invalid_argument("c_update: symbol length mismatch");
    if (!(beta >= 0.0)) throw std::invalid_argument("c_update: beta must be >= 0");
    if (!(r > 0.0)) throw std::invalid_argument("c_update: r must be > 0");

    const double nd = std::sqrt(plan.data_energy(v));
    const double nf = std::sqrt(plan.free_energy(v));
    if (nd == 0.0 && nf == 0.0) throw degenerate_input("c_update: v is zero");

    CUpdateResult out{FreqSymbol(v.size()), 0.0};
    if (beta == 0.0) {
        for (auto k : plan.data_indices()) out.c_next[k] = v[k] / (1.0 + r);
        out.mu_star = std::numeric_limits<double>::infinity();
        return out;
    }
    // With v_D = 0 the feasible set is nonconvex around the origin and the
    // minimizer is not unique; nothing downstream produces this.
    if (nd == 0.0) throw degenerate_input("c_update: data part of v is zero");

    const double sb = std::sqrt(beta);
    const double mu = std::max(0.0, ((1.0 + r) * nf - sb * r * nd) / (2.0 * (beta * nf + sb * nd)));
    const double sd = 1.0 / (1.0 + r - 2.0 * mu * beta);
    const double sf = 1.0 / (r + 2.0 * mu);
    for (auto k : plan.data_indices()) out.c_next[k] = v[k] * sd;
    for (auto k : plan.free_indices()) out.c_next[k] = v[k] * sf;
    out.mu_star = mu;
    return out;
}

// ---------------------------------------------------------------------------
// x-update: maximize Re(z^H b) s.t. ||z||^2 <= 1, |z_i|^2 <= alpha / lN,
// then x = max(0, Re(z^H b)) z.
// ---------------------------------------------------------------------------

struct BisectionConfig {
    double gamma_left0 = 0.0;
    double gamma_right0 = 100.0;
    int max_iters = 60;
    double tol = 1e-8;
    double expansion = 2.0;
    int max_expansions = 20;

    void validate() const
    {
        if (!(gamma_left0 >= 0.0 && gamma_left0 < gamma_right0))
            throw std::invalid_argument("bisection: need 0 <= gamma_left < gamma_right");
        if (!(tol > 0.0)) throw std::invalid_argument("bisection: tol must be > 0");
        if (max_iters < 1) throw std::invalid_argument("bisection: max_iters must be >= 1");
        if (!(expansion > 1.0)) throw std::invalid_argument("bisection: expansion must be > 1");
    }
};

struct ZProjection {
    TimeSymbol z;
    double gamma_star = 0.0;
    int iterations = 0;
    bool degenerate = false; // b == 0: z is an arbitrary feasible unit vector
};

struct XUpdateResult {
    TimeSymbol x_next;
    TimeSymbol z;
    double t = 0.0;
    double gamma_star = 0.0;
    bool degenerate = false;
};

inline double papr_cap(double alpha, std::size_t len) { return std::sqrt(alpha / static_cast<double>(len)); }

// ||z(gamma)||^2 for the clipped-scaling family; non-increasing in gamma.
inline double z_energy(const TimeSymbol& b, double alpha, double gamma)
{
    const double cap = papr_cap(alpha, b.size());
    const double cap2 = cap * cap;
    double e = 0.0;
    for (const auto& bi : b) {
        const double m = std::abs(bi) / (2.0 * gamma);
        e += m < cap ? m * m : cap2;
    }
    return e;
}

namespace detail {

inline double z_energy_mags(const std::vector<double>& mags, double cap, double gamma)
{
    const double cap2 = cap * cap;
    const double inv = 1.0 / (2.0 * gamma);
    double e = 0.0;
    for (double m : mags) {
        const double s = m * inv;
        e += s < cap ? s * s : cap2;
    }
    return e;
}

inline cplx unit_phase(cplx b)
{
    const double m = std::abs(b);
    return m > 0.0 ? b / m : cplx(1.0, 0.0);
}

inline TimeSymbol z_at(const TimeSymbol& b, double cap, double gamma)
{
    TimeSymbol z(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double m = std::abs(b[i]) / (2.0 * gamma);
        z[i] = m < cap ? b[i] / (2.0 * gamma) : cap * unit_phase(b[i]);
    }
    return z;
}

// Given the clip set at gamma, solve ||z||^2 = 1 for gamma in closed form.
// Returns gamma unchanged if the clip set would move.
inline double polish_gamma(const TimeSymbol& b, double cap, double gamma)
{
    double free_energy = 0.0;
    std::size_t clipped = 0;
    for (const auto& bi : b) {
        if (std::abs(bi) / (2.0 * gamma) < cap)
            free_energy += std::norm(bi);
        else
            ++clipped;
    }
    const double rest = 1.0 - static_cast<double>(clipped) * cap * cap;
    if (!(rest > 0.0) || !(free_energy > 0.0)) return gamma;
    const double g = 0.5 * std::sqrt(free_energy / rest);
    for (const auto& bi : b) {
        const bool was = std::abs(bi) / (2.0 * gamma) < cap;
        const bool now = std::abs(bi) / (2.0 * g) < cap;
        if (was != now) return gamma;
    }
    return g;
}

} // namespace detail

inline ZProjection z_projection(const TimeSymbol& b, double alpha, const BisectionConfig& cfg = {})
{
    if (!(alpha >= 1.0)) throw std::invalid_argument("z_projection: alpha must be >= 1");
    cfg.validate();
    const std::size_t len = b.size();
    if (len == 0) throw std::invalid_argument("z_projection: empty input");
    const double cap = papr_cap(alpha, len);

    std::size_t nonzero = 0;
    for (const auto& bi : b)
        if (bi != cplx(0.0, 0.0)) ++nonzero;

    ZProjection out;
    if (nonzero == 0) {
        out.z = TimeSymbol(std::vector<cplx>(len, cplx(1.0 / std::sqrt(static_cast<double>(len)), 0.0)));
        out.degenerate = true;
        return out;
    }

    // Every nonzero entry at the cap still leaves energy unused: zero entries
    // don't affect the objective, so spread the remainder over them.
    const double saturated = static_cast<double>(nonzero) * cap * cap;
    if (saturated <= 1.0 + cfg.tol) {
        TimeSymbol z(len);
        const std::size_t zeros = len - nonzero;
        const double fill = zeros > 0 ? std::sqrt(std::max(0.0, 1.0 - saturated) / static_cast<double>(zeros)) : 0.0;
        double min_mag = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < len; ++i) {
            if (b[i] == cplx(0.0, 0.0)) {
                z[i] = fill;
            } else {
                z[i] = cap * detail::unit_phase(b[i]);
                min_mag = std::min(min_mag, std::abs(b[i]));
            }
        }
        out.z = std::move(z);
        out.gamma_star = min_mag / (2.0 * cap);
        return out;
    }

    std::vector<double> mags(len);
    for (std::size_t i = 0; i < len; ++i) mags[i] = std::abs(b[i]);

    double lo = cfg.gamma_left0;
    double hi = cfg.gamma_right0;
    int expansions = 0;
    while (detail::z_energy_mags(mags, cap, hi) > 1.0) {
        if (++expansions > cfg.max_expansions)
            throw numerical_failure("z_projection: cannot bracket gamma (right end " + std::to_string(hi) +
                                    ", energy " + std::to_string(detail::z_energy_mags(mags, cap, hi)) + ")");
        lo = hi;
        hi *= cfg.expansion;
    }

    double gamma = 0.5 * (lo + hi);
    int it = 0;
    for (; it < cfg.max_iters; ++it) {
        gamma = 0.5 * (lo + hi);
        const double e = detail::z_energy_mags(mags, cap, gamma);
        if (std::abs(e - 1.0) <= cfg.tol) break;
        if (e > 1.0)
            lo = gamma;
        else
            hi = gamma;
    }
    gamma = detail::polish_gamma(b, cap, gamma);

    out.z = detail::z_at(b, cap, gamma);
    out.gamma_star = gamma;
    out.iterations = it;
    return out;
}

inline XUpdateResult x_update(const TimeSymbol& b, double alpha, const BisectionConfig& cfg = {})
{
    auto zp = z_projection(b, alpha, cfg);
    XUpdateResult out;
    out.gamma_star = zp.gamma_star;
    out.degenerate = zp.degenerate;
    out.t = zp.degenerate ? 0.0 : std::max(0.0, real_inner(zp.z, b));
    out.x_next = zp.z * out.t;
    out.z = std::move(zp.z);
    return out;
}

// ---------------------------------------------------------------------------
// (u, w) update: joint minimizer of the relaxed augmented Lagrangian. Once
// y2 = -y1 (true after every multiplier step) this reduces to
//   u = (y1 + rt x + (rho + rt) ac) / (2 rt + rho)
//   w = (y2 + (rt + rho) x + rt ac) / (2 rt + rho)
// ---------------------------------------------------------------------------

struct UWUpdate {
    TimeSymbol u;
    TimeSymbol w;
};

inline UWUpdate uw_update(const TimeSymbol& x, const TimeSymbol& ac, const TimeSymbol& y1, const TimeSymbol& y2,
                          double rho, double rho_tilde)
{
    if (!(rho > 0.0) || !(rho_tilde > 0.0)) throw std::invalid_argument("uw_update: rho and rho_tilde must be > 0");
    const auto sum = ac + x + (y1 + y2) / rho;
    const auto diff = (y1 - y2 + (ac - x) * rho) / (2.0 * rho_tilde + rho);
    return {(sum + diff) * 0.5, (sum - diff) * 0.5};
}

} // namespace ofdm_papr
