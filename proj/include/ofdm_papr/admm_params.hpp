#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

#include "subproblems.hpp"

namespace ofdm_papr {

struct AdmmParams {
    double alpha = 2.5118864315095801; // 4 dB, linear
    double beta = 0.15;
    double rho = 100.0;
    double rho_tilde = 0.0; // Relax only
    int max_iters = 5;
    double eps = 1e-8;      // stop once the iterate-change residual drops below this
    std::size_t oversampling = 4;
    bool bypass = true;     // leave symbols already at or below alpha untouched
    BisectionConfig bisection{};

    static double alpha_from_db(double db) { return std::pow(10.0, db / 10.0); }

    void validate() const
    {
        if (!(alpha >= 1.0)) throw std::invalid_argument("admm: alpha must be >= 1 (linear)");
        if (!(beta >= 0.0)) throw std::invalid_argument("admm: beta must be >= 0");
        if (!(rho > 0.0)) throw std::invalid_argument("admm: rho must be > 0");
        if (max_iters < 0) throw std::invalid_argument("admm: max_iters must be >= 0");
        if (oversampling < 1) throw std::invalid_argument("admm: oversampling must be >= 1");
        bisection.validate();
    }
};

// One row per ADMM iteration.
struct IterRecord {
    int k = 0;
    double primal_residual = 0.0;  // ||Ac - x||
    double change_residual = 0.0;  // ||c+ - c||^2 + ||x+ - x||^2 (Direct), ||u+ - u||^2 + ||w+ - w||^2 (Relax)
    double lagrangian = 0.0;
    double mu = 0.0;
    double gamma = 0.0;
    // Relax only
    double descent_lhs = 0.0;
    double descent_rhs = 0.0;
    bool descent_ok = true;
    double multiplier_residual = 0.0;
};

using IterTrace = std::vector<IterRecord>;

} // namespace ofdm_papr
