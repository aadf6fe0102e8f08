#pragma once

// Oversampled IFFT/FFT pair between N carriers and lN time samples.
//
//   x = A c,         A[n,k] = exp(j 2 pi n k / lN) / lN,  k < N
//   c = lN A^H x     (forward lN-point DFT, first N bins)
//
// Backed by FFTW with exact-size plans, so lN need not be a power of two.

#include <fftw3.h>

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "signal.hpp"

namespace ofdm_papr {

namespace detail {

// FFTW's planner is not reentrant; execution of an existing plan is.
inline std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

class FftwPlan {
public:
    FftwPlan(std::size_t n, int sign)
    {
        std::vector<cplx> in(n), out(n);
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()), sign,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
        if (!plan_) throw std::runtime_error("fftw: plan creation failed");
    }
    ~FftwPlan()
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    FftwPlan(const FftwPlan&) = delete;
    FftwPlan& operator=(const FftwPlan&) = delete;

    void execute(const cplx* in, cplx* out) const
    {
        // FFTW never writes the input of an out-of-place c2c transform.
        fftw_execute_dft(plan_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

private:
    fftw_plan plan_ = nullptr;
};

} // namespace detail

class OversampledTransform {
public:
    OversampledTransform(std::size_t n_carriers, std::size_t oversampling)
        : n_(n_carriers), ell_(oversampling)
    {
        if (n_carriers < 2) throw std::invalid_argument("transform: need at least 2 carriers");
        if (oversampling < 1) throw std::invalid_argument("transform: oversampling factor must be >= 1");
        const std::size_t len = n_ * ell_;
        backward_ = std::make_shared<detail::FftwPlan>(len, FFTW_BACKWARD);
        forward_ = std::make_shared<detail::FftwPlan>(len, FFTW_FORWARD);
    }

    std::size_t carriers() const noexcept { return n_; }
    std::size_t oversampling() const noexcept { return ell_; }
    std::size_t time_length() const noexcept { return n_ * ell_; }

    TimeSymbol ifft(const FreqSymbol& c) const
    {
        if (c.size() != n_) throw std::invalid_argument("ifft: carrier count mismatch");
        const std::size_t len = time_length();
        std::vector<cplx> padded(len);
        std::copy(c.begin(), c.end(), padded.begin());
        TimeSymbol x(len);
        backward_->execute(padded.data(), x.data());
        x *= 1.0 / static_cast<double>(len);
        return x;
    }

    FreqSymbol fft(const TimeSymbol& x) const
    {
        const std::size_t len = time_length();
        if (x.size() != len) throw std::invalid_argument("fft: sample count mismatch");
        std::vector<cplx> full(len);
        forward_->execute(x.data(), full.data());
        full.resize(n_);
        return FreqSymbol(std::move(full));
    }

    // Full lN-bin forward DFT (used for out-of-band accounting).
    std::vector<cplx> full_spectrum(const TimeSymbol& x) const
    {
        const std::size_t len = time_length();
        if (x.size() != len) throw std::invalid_argument("fft: sample count mismatch");
        std::vector<cplx> full(len);
        forward_->execute(x.data(), full.data());
        return full;
    }

    // A^H x = fft(x) / lN
    FreqSymbol adjoint(const TimeSymbol& x) const
    {
        auto c = fft(x);
        c /= static_cast<double>(time_length());
        return c;
    }

private:
    std::size_t n_;
    std::size_t ell_;
    std::shared_ptr<const detail::FftwPlan> backward_;
    std::shared_ptr<const detail::FftwPlan> forward_;
};

// Per-thread cache so the free functions below don't re-plan on every call.
inline const OversampledTransform& cached_transform(std::size_t n_carriers, std::size_t oversampling)
{
    thread_local std::map<std::pair<std::size_t, std::size_t>, OversampledTransform> cache;
    const auto key = std::make_pair(n_carriers, oversampling);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, OversampledTransform(n_carriers, oversampling)).first;
    return it->second;
}

inline TimeSymbol ifft_oversampled(const FreqSymbol& c, std::size_t oversampling)
{
    return cached_transform(c.size(), oversampling).ifft(c);
}

inline FreqSymbol fft_oversampled(const TimeSymbol& x, std::size_t oversampling)
{
    if (oversampling < 1 || x.size() % oversampling != 0)
        throw std::invalid_argument("fft_oversampled: length is not a multiple of the oversampling factor");
    return cached_transform(x.size() / oversampling, oversampling).fft(x);
}

} // namespace ofdm_papr
