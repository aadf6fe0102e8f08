#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "admm_params.hpp"
#include "carrier_plan.hpp"
#include "errors.hpp"
#include "papr.hpp"
#include "signal.hpp"
#include "subproblems.hpp"
#include "transform.hpp"

namespace ofdm_papr {

struct DirectState {
    FreqSymbol c;
    TimeSymbol x;
    TimeSymbol y;
    int k = 1;
};

struct DirectReport {
    IterTrace trace;
    double kkt_residual = 0.0;
    bool converged = false;
    bool bypassed = false;
    int degenerate_steps = 0; // x-updates that hit b == 0
    double mu_star = 0.0;
    double gamma_star = 0.0;
};

struct DirectResult {
    TimeSymbol x;
    FreqSymbol c;
    DirectReport report;
    DirectState state;
};

// 1/2 ||S_D(c - c_o)||^2 + Re(y^H (Ac - x)) + rho/2 ||Ac - x||^2
inline double direct_lagrangian(const DirectState& s, const TimeSymbol& ac, const FreqSymbol& c_o,
                                const CarrierPlan& plan, double rho)
{
    const auto r = ac - s.x;
    return 0.5 * plan.data_distortion(s.c, c_o) + real_inner(s.y, r) + 0.5 * rho * squared_norm(r);
}

class DirectSolver {
public:
    DirectSolver(FreqSymbol c_o, CarrierPlan plan, AdmmParams params)
        : c_o_(std::move(c_o)), plan_(std::move(plan)), p_(params),
          tf_(cached_transform(plan_.n_carriers(), params.oversampling))
    {
        p_.validate();
        if (c_o_.size() != plan_.n_carriers()) throw std::invalid_argument("direct: c_o length mismatch");
        if (plan_.free_energy(c_o_) != 0.0) throw std::invalid_argument("direct: c_o has energy on free carriers");

        s_.c = c_o_;
        const auto x0 = tf_.ifft(c_o_);
        auto xu = x_update(x0, p_.alpha, p_.bisection);
        if (xu.degenerate) throw degenerate_input("direct: zero-energy input symbol");
        s_.x = std::move(xu.x_next);
        s_.y = TimeSymbol(tf_.time_length());
        gamma_ = xu.gamma_star;
    }

    const DirectState& state() const noexcept { return s_; }
    const TimeSymbol& previous_x() const noexcept { return x_prev_; }
    double mu() const noexcept { return mu_; }
    double gamma() const noexcept { return gamma_; }
    int degenerate_steps() const noexcept { return degenerate_; }
    const OversampledTransform& transform() const noexcept { return tf_; }

    IterRecord step()
    {
        const double rho = p_.rho;
        const double r = rho / static_cast<double>(tf_.time_length());
        try {
            auto v = c_o_ + tf_.fft(s_.x - s_.y / rho) * r;
            auto cu = c_update(v, plan_, p_.beta, r);
            const auto ac = tf_.ifft(cu.c_next);
            auto xu = x_update(ac + s_.y / rho, p_.alpha, p_.bisection);
            if (xu.degenerate) ++degenerate_;

            IterRecord rec;
            rec.k = s_.k;
            rec.change_residual = squared_distance(cu.c_next, s_.c) + squared_distance(xu.x_next, s_.x);
            x_prev_ = std::move(s_.x);
            s_.c = std::move(cu.c_next);
            s_.x = std::move(xu.x_next);
            s_.y += (ac - s_.x) * rho;
            ++s_.k;
            mu_ = cu.mu_star;
            gamma_ = xu.gamma_star;

            if (!all_finite(s_.x) || !all_finite(s_.c) || !all_finite(s_.y))
                throw numerical_failure("direct: non-finite iterate", rec.k);

            rec.primal_residual = std::sqrt(squared_distance(ac, s_.x));
            rec.lagrangian = direct_lagrangian(s_, ac, c_o_, plan_, rho);
            rec.mu = mu_;
            rec.gamma = gamma_;
            return rec;
        } catch (const numerical_failure&) {
            throw;
        } catch (const degenerate_input& e) {
            throw numerical_failure(std::string("direct: ") + e.what(), s_.k);
        }
    }

private:
    FreqSymbol c_o_;
    CarrierPlan plan_;
    AdmmParams p_;
    OversampledTransform tf_;
    DirectState s_;
    TimeSymbol x_prev_;
    double mu_ = 0.0;
    double gamma_ = 0.0;
    int degenerate_ = 0;
};

struct KktResidual {
    double primal = 0.0;     // ||Ac - x||
    double grad_c = 0.0;     // ||grad_c L||
    double grad_x = 0.0;     // distance of grad_x L from the normal cone of the PAPR set
    double slackness = 0.0;  // |mu (||S_F c||^2 - beta ||S_D c||^2)| plus any constraint violation
    double dual_sign = 0.0;  // max(0, -mu)

    double value() const { return std::max({primal, grad_c, grad_x, slackness, dual_sign}); }
};

// Stationarity of
//   L = 1/2 ||S_D(c - c_o)||^2 + mu (||S_F c||^2 - beta ||S_D c||^2) + Re(y^H (Ac - x))
// in c, and of the x-subproblem with multiplier gamma on ||z||^2 <= 1 in x:
// with t = ||x||, lambda = 2 gamma / t and b = x + y / rho, every unclipped
// sample satisfies b_i = lambda x_i and every clipped one b_i - lambda x_i
// is a non-negative multiple of x_i's phase.
inline KktResidual direct_kkt_components(const DirectState& s, const FreqSymbol& c_o, const CarrierPlan& plan,
                                         const AdmmParams& params, double mu, double gamma)
{
    const auto& tf = cached_transform(plan.n_carriers(), params.oversampling);
    KktResidual out;
    const auto ac = tf.ifft(s.c);
    out.primal = std::sqrt(squared_distance(ac, s.x));

    const auto aty = tf.adjoint(s.y);
    const double ef = plan.free_energy(s.c);
    const double ed = plan.data_energy(s.c);
    double g2 = 0.0;
    if (params.beta == 0.0 || std::isinf(mu)) {
        // Free carriers are pinned to zero; their multiplier is unconstrained.
        for (auto k : plan.data_indices()) g2 += std::norm(s.c[k] - c_o[k] + aty[k]);
        out.slackness = ef;
    } else {
        for (auto k : plan.data_indices())
            g2 += std::norm(s.c[k] - c_o[k] - 2.0 * mu * params.beta * s.c[k] + aty[k]);
        for (auto k : plan.free_indices()) g2 += std::norm(2.0 * mu * s.c[k] + aty[k]);
        out.slackness = std::abs(mu * (ef - params.beta * ed)) + std::max(0.0, ef - params.beta * ed);
        out.dual_sign = std::max(0.0, -mu);
    }
    out.grad_c = std::sqrt(g2);

    const double rho = params.rho;
    const double t = norm2(s.x);
    auto b = s.x + s.y / rho;
    if (t == 0.0) {
        out.grad_x = rho * norm2(b);
        return out;
    }
    const double lambda = 2.0 * gamma / t;
    const double cap = papr_cap(params.alpha, s.x.size()) * t;
    double r2 = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const cplx d = b[i] - lambda * s.x[i];
        const double m = std::abs(s.x[i]);
        if (m >= cap * (1.0 - 1e-9)) {
            const cplx ph = s.x[i] / m;
            const cplx rot = d * std::conj(ph);
            const double e = std::abs(rot.imag()) + std::max(0.0, -rot.real());
            r2 += e * e;
        } else {
            r2 += std::norm(d);
        }
    }
    out.grad_x = rho * std::sqrt(r2);
    return out;
}

inline double direct_kkt_residual(const DirectState& s, const FreqSymbol& c_o, const CarrierPlan& plan,
                                  const AdmmParams& params, double mu, double gamma)
{
    return direct_kkt_components(s, c_o, plan, params, mu, gamma).value();
}

inline DirectResult direct_solve(const FreqSymbol& c_o, const CarrierPlan& plan, const AdmmParams& params)
{
    params.validate();
    const auto& tf = cached_transform(plan.n_carriers(), params.oversampling);
    const auto x0 = tf.ifft(c_o);
    if (params.bypass && papr(x0) <= params.alpha) {
        DirectResult out{x0, c_o, {}, {c_o, x0, TimeSymbol(x0.size()), 1}};
        out.report.bypassed = true;
        out.report.converged = true;
        return out;
    }

    DirectSolver solver(c_o, plan, params);
    DirectReport report;
    report.gamma_star = solver.gamma();
    for (int i = 0; i < params.max_iters; ++i) {
        report.trace.push_back(solver.step());
        if (report.trace.back().change_residual < params.eps) {
            report.converged = true;
            break;
        }
    }
    report.mu_star = solver.mu();
    report.gamma_star = solver.gamma();
    report.degenerate_steps = solver.degenerate_steps();
    const auto& st = solver.state();
    if (!report.trace.empty())
        report.kkt_residual = direct_kkt_residual(st, c_o, plan, params, report.mu_star, report.gamma_star);
    return {st.x, st.c, std::move(report), st};
}

} // namespace ofdm_papr
