#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "admm_direct.hpp"
#include "admm_params.hpp"
#include "carrier_plan.hpp"
#include "errors.hpp"
#include "papr.hpp"
#include "signal.hpp"
#include "subproblems.hpp"
#include "transform.hpp"

namespace ofdm_papr {

struct RelaxState {
    FreqSymbol c;
    TimeSymbol x, u, w, y1, y2;
    int k = 1;
};

struct RelaxReport {
    IterTrace trace;
    double consensus_gap = 0.0; // ||Ac - x||^2 at the output
    double initial_lagrangian = 0.0;
    bool converged = false;
    bool bypassed = false;
    bool feasible_start = false;
    int degenerate_steps = 0;
};

struct RelaxResult {
    TimeSymbol x;
    FreqSymbol c;
    RelaxReport report;
    RelaxState state;
};

// Smallest eigenvalue of the descent matrix Q for rho > 2 rho_tilde.
inline double lambda_min_q(double rho, double rho_tilde)
{
    return std::min(rho / 2.0, (rho * rho + 2.0 * rho * rho_tilde - 8.0 * rho_tilde * rho_tilde) / (2.0 * rho));
}

inline void check_relax_penalties(double rho, double rho_tilde)
{
    if (!(rho_tilde > 0.0)) throw std::invalid_argument("relax: rho_tilde must be > 0");
    if (!(rho > 2.0 * rho_tilde))
        throw std::invalid_argument("relax: need rho > 2 rho_tilde (got rho=" + std::to_string(rho) +
                                    ", rho_tilde=" + std::to_string(rho_tilde) + ")");
}

// 1/2 ||S_D(c - c_o)||^2 + Re(y1^H (Ac - u)) + Re(y2^H (x - w))
//   + rho_tilde/2 ||u - w||^2 + rho/2 (||Ac - u||^2 + ||x - w||^2)
inline double relax_lagrangian(const RelaxState& s, const TimeSymbol& ac, const FreqSymbol& c_o,
                               const CarrierPlan& plan, double rho, double rho_tilde)
{
    const auto r1 = ac - s.u;
    const auto r2 = s.x - s.w;
    return 0.5 * plan.data_distortion(s.c, c_o) + real_inner(s.y1, r1) + real_inner(s.y2, r2) +
           0.5 * rho_tilde * squared_distance(s.u, s.w) + 0.5 * rho * (squared_norm(r1) + squared_norm(r2));
}

// Same value once y1 = rho_tilde (u - w) and y2 = -y1, written as a sum of
// squares that is non-negative whenever rho >= 2 rho_tilde.
inline double relax_lagrangian_sos(const RelaxState& s, const TimeSymbol& ac, const FreqSymbol& c_o,
                                   const CarrierPlan& plan, double rho, double rho_tilde)
{
    const auto m = (s.u + s.w) * 0.5;
    return 0.5 * plan.data_distortion(s.c, c_o) + rho_tilde * squared_distance(ac, m) +
           (0.5 * rho - rho_tilde) * (squared_distance(ac, s.u) + squared_distance(s.x, s.w)) +
           rho_tilde * squared_distance(s.x, m);
}

inline double multiplier_identity_residual(const RelaxState& s, double rho_tilde)
{
    const auto d = (s.u - s.w) * rho_tilde;
    return std::max(norm_inf(s.y1 - d), norm_inf(s.y2 + d));
}

struct DescentCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool ok = true;
};

inline DescentCheck descent_check(double lagrangian_k, double lagrangian_k1, const RelaxState& s_k,
                                  const RelaxState& s_k1, double rho, double rho_tilde)
{
    DescentCheck d;
    d.lhs = lagrangian_k - lagrangian_k1;
    d.rhs = lambda_min_q(rho, rho_tilde) * (squared_distance(s_k1.u, s_k.u) + squared_distance(s_k1.w, s_k.w));
    d.ok = d.lhs >= d.rhs - 1e-8 * (1.0 + std::abs(d.lhs));
    return d;
}

enum class RelaxStart {
    standard,    // c = c_o, x = P(Ac_o), u = Ac, w = x, y1 = y2 = 0
    consistent,  // as standard, then y1 = rho_tilde (u - w), y2 = -y1
};

class RelaxSolver {
public:
    RelaxSolver(FreqSymbol c_o, CarrierPlan plan, AdmmParams params, RelaxStart start = RelaxStart::standard)
        : c_o_(std::move(c_o)), plan_(std::move(plan)), p_(params),
          tf_(cached_transform(plan_.n_carriers(), params.oversampling))
    {
        validate();
        s_.c = c_o_;
        auto xu = x_update(tf_.ifft(c_o_), p_.alpha, p_.bisection);
        if (xu.degenerate) throw degenerate_input("relax: zero-energy input symbol");
        s_.x = std::move(xu.x_next);
        s_.u = tf_.ifft(s_.c);
        s_.w = s_.x;
        s_.y1 = TimeSymbol(tf_.time_length());
        s_.y2 = TimeSymbol(tf_.time_length());
        if (start == RelaxStart::consistent) {
            s_.y1 = (s_.u - s_.w) * p_.rho_tilde;
            s_.y2 = s_.y1 * -1.0;
        }
        refresh();
    }

    // Start from a point with Ac = x = u = w and zero multipliers; c must
    // satisfy the free-carrier power constraint and papr(Ac) <= alpha.
    RelaxSolver(FreqSymbol c_o, CarrierPlan plan, AdmmParams params, FreqSymbol c1)
        : c_o_(std::move(c_o)), plan_(std::move(plan)), p_(params),
          tf_(cached_transform(plan_.n_carriers(), params.oversampling))
    {
        validate();
        if (c1.size() != plan_.n_carriers()) throw std::invalid_argument("relax: c1 length mismatch");
        s_.c = std::move(c1);
        s_.x = tf_.ifft(s_.c);
        s_.u = s_.x;
        s_.w = s_.x;
        s_.y1 = TimeSymbol(tf_.time_length());
        s_.y2 = TimeSymbol(tf_.time_length());
        refresh();
    }

    const RelaxState& state() const noexcept { return s_; }
    double lagrangian() const noexcept { return lagrangian_; }
    double sos_lagrangian() const
    {
        return relax_lagrangian_sos(s_, ac_, c_o_, plan_, p_.rho, p_.rho_tilde);
    }
    double mu() const noexcept { return mu_; }
    double gamma() const noexcept { return gamma_; }
    int degenerate_steps() const noexcept { return degenerate_; }
    const TimeSymbol& ac() const noexcept { return ac_; }

    IterRecord step()
    {
        const double rho = p_.rho;
        const double rt = p_.rho_tilde;
        const double r = rho / static_cast<double>(tf_.time_length());
        try {
            RelaxState next;
            next.k = s_.k + 1;
            auto v = c_o_ + tf_.fft(s_.u - s_.y1 / rho) * r;
            auto cu = c_update(v, plan_, p_.beta, r);
            auto xu = x_update(s_.w - s_.y2 / rho, p_.alpha, p_.bisection);
            if (xu.degenerate) ++degenerate_;
            next.c = std::move(cu.c_next);
            next.x = std::move(xu.x_next);
            auto ac = tf_.ifft(next.c);
            auto uw = uw_update(next.x, ac, s_.y1, s_.y2, rho, rt);
            next.u = std::move(uw.u);
            next.w = std::move(uw.w);
            next.y1 = s_.y1 + (ac - next.u) * rho;
            next.y2 = s_.y2 + (next.x - next.w) * rho;

            if (!all_finite(next.x) || !all_finite(next.c) || !all_finite(next.y1) || !all_finite(next.y2))
                throw numerical_failure("relax: non-finite iterate", s_.k);

            const double l_next = relax_lagrangian(next, ac, c_o_, plan_, rho, rt);
            const auto dc = descent_check(lagrangian_, l_next, s_, next, rho, rt);

            IterRecord rec;
            rec.k = s_.k;
            rec.change_residual = squared_distance(next.u, s_.u) + squared_distance(next.w, s_.w);
            rec.descent_lhs = dc.lhs;
            rec.descent_rhs = dc.rhs;
            rec.descent_ok = dc.ok;
            rec.lagrangian = l_next;
            rec.mu = cu.mu_star;
            rec.gamma = xu.gamma_star;
            rec.primal_residual = std::sqrt(squared_distance(ac, next.x));
            rec.multiplier_residual = multiplier_identity_residual(next, rt);

            s_ = std::move(next);
            ac_ = std::move(ac);
            lagrangian_ = l_next;
            mu_ = cu.mu_star;
            gamma_ = xu.gamma_star;
            return rec;
        } catch (const numerical_failure&) {
            throw;
        } catch (const degenerate_input& e) {
            throw numerical_failure(std::string("relax: ") + e.what(), s_.k);
        }
    }

private:
    void validate()
    {
        p_.validate();
        check_relax_penalties(p_.rho, p_.rho_tilde);
        if (c_o_.size() != plan_.n_carriers()) throw std::invalid_argument("relax: c_o length mismatch");
        if (plan_.free_energy(c_o_) != 0.0) throw std::invalid_argument("relax: c_o has energy on free carriers");
    }

    void refresh()
    {
        ac_ = tf_.ifft(s_.c);
        lagrangian_ = relax_lagrangian(s_, ac_, c_o_, plan_, p_.rho, p_.rho_tilde);
    }

    FreqSymbol c_o_;
    CarrierPlan plan_;
    AdmmParams p_;
    OversampledTransform tf_;
    RelaxState s_;
    TimeSymbol ac_;
    double lagrangian_ = 0.0;
    double mu_ = 0.0;
    double gamma_ = 0.0;
    int degenerate_ = 0;
};

namespace detail {

inline RelaxResult run_relax(RelaxSolver& solver, const AdmmParams& params, bool feasible_start)
{
    RelaxReport report;
    report.feasible_start = feasible_start;
    report.initial_lagrangian = solver.lagrangian();
    for (int i = 0; i < params.max_iters; ++i) {
        report.trace.push_back(solver.step());
        if (report.trace.back().change_residual < params.eps) {
            report.converged = true;
            break;
        }
    }
    report.degenerate_steps = solver.degenerate_steps();
    const auto& st = solver.state();
    report.consensus_gap = squared_distance(solver.ac(), st.x);
    return {st.x, st.c, std::move(report), st};
}

} // namespace detail

inline RelaxResult relax_solve(const FreqSymbol& c_o, const CarrierPlan& plan, const AdmmParams& params,
                               RelaxStart start = RelaxStart::standard)
{
    params.validate();
    check_relax_penalties(params.rho, params.rho_tilde);
    const auto& tf = cached_transform(plan.n_carriers(), params.oversampling);
    const auto x0 = tf.ifft(c_o);
    if (params.bypass && papr(x0) <= params.alpha) {
        const TimeSymbol zero(x0.size());
        RelaxResult out{x0, c_o, {}, {c_o, x0, x0, x0, zero, zero, 1}};
        out.report.bypassed = true;
        out.report.converged = true;
        return out;
    }
    RelaxSolver solver(c_o, plan, params, start);
    return detail::run_relax(solver, params, false);
}

// Builds c1 with papr(Ac1) <= alpha and the free-carrier constraint satisfied
// by running Direct against a slightly tighter target. Returns nullopt when
// the result still misses the PAPR target.
inline std::optional<FreqSymbol> make_feasible_start(const FreqSymbol& c_o, const CarrierPlan& plan,
                                                     const AdmmParams& params, double margin_db = 0.2,
                                                     int iterations = 100, double direct_rho = 100.0)
{
    const auto& tf = cached_transform(plan.n_carriers(), params.oversampling);
    if (papr(tf.ifft(c_o)) <= params.alpha) return c_o;
    AdmmParams p = params;
    p.alpha = std::max(1.0, params.alpha * std::pow(10.0, -margin_db / 10.0));
    p.rho = direct_rho;
    p.max_iters = iterations;
    p.bypass = false;
    auto res = direct_solve(c_o, plan, p);
    const double ef = plan.free_energy(res.c);
    const double ed = plan.data_energy(res.c);
    if (ef > params.beta * ed * (1.0 + 1e-12) + 1e-15) return std::nullopt;
    if (papr(tf.ifft(res.c)) > params.alpha) return std::nullopt;
    return res.c;
}

inline RelaxResult relax_solve_feasible(const FreqSymbol& c_o, const CarrierPlan& plan, const AdmmParams& params,
                                        const FreqSymbol& c1)
{
    RelaxSolver solver(c_o, plan, params, c1);
    return detail::run_relax(solver, params, true);
}

struct Theorem3Check {
    double bound = 0.0;
    int actual_r = -1; // -1: residual never reached epsilon
    bool pass = false;         // actual_r <= bound
    bool pass_shifted = false; // actual_r - 1 <= bound; the descent sum only spans iterations 1..r-1
};

// First-passage iteration of the residual versus (L(1) - L*) / (C eps).
inline Theorem3Check theorem3_bound(const RelaxReport& report, const RelaxState& final_state, const FreqSymbol& c_o,
                                    const CarrierPlan& plan, double rho, double rho_tilde, double eps)
{
    Theorem3Check out;
    const double l_star =
        0.5 * plan.data_distortion(final_state.c, c_o) + 0.5 * rho_tilde * squared_distance(final_state.u, final_state.w);
    out.bound = (report.initial_lagrangian - l_star) / (lambda_min_q(rho, rho_tilde) * eps);
    for (const auto& rec : report.trace) {
        if (rec.change_residual <= eps) {
            out.actual_r = rec.k;
            break;
        }
    }
    out.pass = out.actual_r >= 1 && static_cast<double>(out.actual_r) <= out.bound;
    out.pass_shifted = out.actual_r >= 1 && static_cast<double>(out.actual_r - 1) <= out.bound;
    return out;
}

} // namespace ofdm_papr
