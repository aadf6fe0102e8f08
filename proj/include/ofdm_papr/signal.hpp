#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ofdm_papr {

using cplx = std::complex<double>;

struct freq_domain {};
struct time_domain {};

// Complex sample vector tagged with its domain, so a carrier vector can never
// be passed where time samples are expected.
template <typename Domain>
class Signal {
public:
    using value_type = cplx;
    using iterator = std::vector<cplx>::iterator;
    using const_iterator = std::vector<cplx>::const_iterator;

    Signal() = default;
    explicit Signal(std::size_t n) : data_(n) {}
    explicit Signal(std::vector<cplx> samples) : data_(std::move(samples)) {}
    Signal(std::initializer_list<cplx> il) : data_(il) {}

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator[](std::size_t i) noexcept { return data_[i]; }
    const cplx& operator[](std::size_t i) const noexcept { return data_[i]; }

    iterator begin() noexcept { return data_.begin(); }
    iterator end() noexcept { return data_.end(); }
    const_iterator begin() const noexcept { return data_.begin(); }
    const_iterator end() const noexcept { return data_.end(); }

    cplx* data() noexcept { return data_.data(); }
    const cplx* data() const noexcept { return data_.data(); }

    std::span<cplx> span() noexcept { return data_; }
    std::span<const cplx> span() const noexcept { return data_; }
    const std::vector<cplx>& samples() const noexcept { return data_; }

    Signal& operator+=(const Signal& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Signal& operator-=(const Signal& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Signal& operator*=(cplx s) noexcept
    {
        for (auto& v : data_) v *= s;
        return *this;
    }
    Signal& operator*=(double s) noexcept
    {
        for (auto& v : data_) v *= s;
        return *this;
    }
    Signal& operator/=(double s) noexcept
    {
        for (auto& v : data_) v /= s;
        return *this;
    }

    friend Signal operator+(Signal a, const Signal& b) { return a += b; }
    friend Signal operator-(Signal a, const Signal& b) { return a -= b; }
    friend Signal operator*(Signal a, double s) { return a *= s; }
    friend Signal operator*(double s, Signal a) { return a *= s; }
    friend Signal operator*(Signal a, cplx s) { return a *= s; }
    friend Signal operator*(cplx s, Signal a) { return a *= s; }
    friend Signal operator/(Signal a, double s) { return a /= s; }

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    void check_same(const Signal& o) const
    {
        if (o.data_.size() != data_.size())
            throw std::invalid_argument("signal length mismatch");
    }

    std::vector<cplx> data_;
};

/// Length-N carrier vector (frequency domain).
using FreqSymbol = Signal<freq_domain>;
/// Length-lN sample vector (time domain).
using TimeSymbol = Signal<time_domain>;

template <typename D>
double squared_norm(const Signal<D>& s) noexcept
{
    double acc = 0.0;
    for (const auto& v : s) acc += std::norm(v);
    return acc;
}

template <typename D>
double norm2(const Signal<D>& s) noexcept
{
    return std::sqrt(squared_norm(s));
}

template <typename D>
double norm_inf(const Signal<D>& s) noexcept
{
    double m = 0.0;
    for (const auto& v : s) m = std::max(m, std::abs(v));
    return m;
}

template <typename D>
double squared_distance(const Signal<D>& a, const Signal<D>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("signal length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
    return acc;
}

// Re(a^H b)
template <typename D>
double real_inner(const Signal<D>& a, const Signal<D>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("signal length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    return acc;
}

template <typename D>
bool all_finite(const Signal<D>& s) noexcept
{
    return std::all_of(s.begin(), s.end(), [](const cplx& v) {
        return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
}

} // namespace ofdm_papr
