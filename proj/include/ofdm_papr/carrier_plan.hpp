#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "signal.hpp"

namespace ofdm_papr {

// Partition of the N carrier bins into data (D) and free (F) carriers.
class CarrierPlan {
public:
    CarrierPlan() = default;

    CarrierPlan(std::size_t n_carriers, std::vector<std::size_t> free_idx) : n_(n_carriers)
    {
        if (n_carriers < 2) throw std::invalid_argument("carrier plan: need at least 2 carriers");
        is_data_.assign(n_, true);
        std::sort(free_idx.begin(), free_idx.end());
        for (std::size_t i = 0; i < free_idx.size(); ++i) {
            if (free_idx[i] >= n_)
                throw std::invalid_argument("carrier plan: free index " + std::to_string(free_idx[i]) +
                                            " out of range");
            if (i > 0 && free_idx[i] == free_idx[i - 1])
                throw std::invalid_argument("carrier plan: duplicate free index");
            is_data_[free_idx[i]] = false;
        }
        free_ = std::move(free_idx);
        for (std::size_t k = 0; k < n_; ++k)
            if (is_data_[k]) data_.push_back(k);
        if (data_.empty()) throw std::invalid_argument("carrier plan: no data carriers");
    }

    // DC plus the (n_free - 1) highest bins are free; everything else carries data.
    // For N=64, n_free=12 this is the 802.11a null layout (52 data carriers).
    static CarrierPlan with_free_count(std::size_t n_carriers, std::size_t n_free)
    {
        if (n_free >= n_carriers) throw std::invalid_argument("carrier plan: too many free carriers");
        std::vector<std::size_t> f;
        if (n_free > 0) {
            f.push_back(0);
            for (std::size_t k = n_carriers - (n_free - 1); k < n_carriers; ++k) f.push_back(k);
        }
        return CarrierPlan(n_carriers, std::move(f));
    }

    static CarrierPlan wifi_default() { return with_free_count(64, 12); }

    std::size_t n_carriers() const noexcept { return n_; }
    std::size_t n_data() const noexcept { return data_.size(); }
    std::size_t n_free() const noexcept { return free_.size(); }
    const std::vector<std::size_t>& data_indices() const noexcept { return data_; }
    const std::vector<std::size_t>& free_indices() const noexcept { return free_; }
    bool is_data(std::size_t k) const { return is_data_.at(k); }

    // ||S_D c||^2
    double data_energy(const FreqSymbol& c) const
    {
        check(c);
        double e = 0.0;
        for (auto k : data_) e += std::norm(c[k]);
        return e;
    }

    // ||S_F c||^2
    double free_energy(const FreqSymbol& c) const
    {
        check(c);
        double e = 0.0;
        for (auto k : free_) e += std::norm(c[k]);
        return e;
    }

    // ||S_D (a - b)||^2
    double data_distortion(const FreqSymbol& a, const FreqSymbol& b) const
    {
        check(a);
        check(b);
        double e = 0.0;
        for (auto k : data_) e += std::norm(a[k] - b[k]);
        return e;
    }

    FreqSymbol mask_data(FreqSymbol c) const
    {
        check(c);
        for (auto k : free_) c[k] = 0.0;
        return c;
    }

    FreqSymbol mask_free(FreqSymbol c) const
    {
        check(c);
        for (auto k : data_) c[k] = 0.0;
        return c;
    }

private:
    void check(const FreqSymbol& c) const
    {
        if (c.size() != n_) throw std::invalid_argument("carrier plan: symbol length mismatch");
    }

    std::size_t n_ = 0;
    std::vector<std::size_t> data_;
    std::vector<std::size_t> free_;
    std::vector<bool> is_data_;
};

} // namespace ofdm_papr
