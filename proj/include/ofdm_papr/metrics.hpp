#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "carrier_plan.hpp"
#include "signal.hpp"
#include "transform.hpp"

namespace ofdm_papr {

// ---------------------------------------------------------------------------
// EVM
// ---------------------------------------------------------------------------

// ||S_D(c - c_o)||^2 / ||c_o||^2 for one symbol.
inline double evm_ratio(const FreqSymbol& c, const FreqSymbol& c_o, const CarrierPlan& plan)
{
    const double ref = squared_norm(c_o);
    if (!(ref > 0.0)) throw std::invalid_argument("evm: reference symbol has zero energy");
    return plan.data_distortion(c, c_o) / ref;
}

// 10 log10 of the mean ratio, i.e. 20 log10 of the RMS value. -inf when
// every symbol is undistorted.
inline double evm_db_from_mean(double mean_ratio)
{
    if (mean_ratio <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(mean_ratio);
}

inline double evm_db(std::span<const FreqSymbol> c, std::span<const FreqSymbol> c_o, const CarrierPlan& plan)
{
    if (c.size() != c_o.size()) throw std::invalid_argument("evm: list length mismatch");
    if (c.empty()) throw std::invalid_argument("evm: need at least one symbol");
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += evm_ratio(c[i], c_o[i], plan);
    return evm_db_from_mean(acc / static_cast<double>(c.size()));
}

// ---------------------------------------------------------------------------
// CCDF
// ---------------------------------------------------------------------------

struct CcdfPoint {
    double threshold_db;
    double prob;
};

inline std::vector<CcdfPoint> ccdf(std::span<const double> samples_db, std::span<const double> thresholds_db)
{
    if (samples_db.empty()) throw std::invalid_argument("ccdf: no samples");
    std::vector<double> sorted(samples_db.begin(), samples_db.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<CcdfPoint> out;
    out.reserve(thresholds_db.size());
    for (double t : thresholds_db) {
        const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), t);
        out.push_back({t, static_cast<double>(above) / static_cast<double>(sorted.size())});
    }
    return out;
}

inline std::vector<double> threshold_grid(double lo, double hi, double step)
{
    std::vector<double> t;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) t.push_back(lo + step * static_cast<double>(i));
    return t;
}

// ---------------------------------------------------------------------------
// BER
// ---------------------------------------------------------------------------

inline std::size_t bit_errors(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    if (tx.size() != rx.size()) throw std::invalid_argument("ber: stream length mismatch");
    std::size_t e = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) e += (tx[i] & 1u) != (rx[i] & 1u);
    return e;
}

inline double ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
{
    if (tx.empty()) throw std::invalid_argument("ber: empty stream");
    return static_cast<double>(bit_errors(tx, rx)) / static_cast<double>(tx.size());
}

// ---------------------------------------------------------------------------
// PSD: averaged windowed periodogram. power[k] * bin_width summed over k
// gives the window-weighted mean power (exactly the mean power for a
// rectangular window or a constant-modulus signal).
// ---------------------------------------------------------------------------

enum class Window { rectangular, hann };

inline std::vector<double> make_window(Window w, std::size_t n)
{
    std::vector<double> out(n, 1.0);
    if (w == Window::hann)
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    return out;
}

class PsdEstimator {
public:
    PsdEstimator(std::size_t seg_len, Window window)
        : seg_(seg_len), window_(make_window(window, seg_len)), acc_(seg_len, 0.0)
    {
        if (seg_len < 2) throw std::invalid_argument("psd: segment length must be >= 2");
        for (double w : window_) wsum2_ += w * w;
    }

    std::size_t segment_length() const noexcept { return seg_; }
    std::size_t segments() const noexcept { return count_; }

    // Consumes floor(len / seg_len) non-overlapping segments.
    void add(std::span<const cplx> stream)
    {
        if (stream.size() < seg_) throw std::invalid_argument("psd: stream shorter than one segment");
        const auto& tf = cached_transform(seg_, 1);
        TimeSymbol buf(seg_);
        for (std::size_t start = 0; start + seg_ <= stream.size(); start += seg_) {
            for (std::size_t i = 0; i < seg_; ++i) buf[i] = stream[start + i] * window_[i];
            const auto spec = tf.full_spectrum(buf);
            for (std::size_t k = 0; k < seg_; ++k) acc_[k] += std::norm(spec[k]);
            ++count_;
        }
    }

    void merge(const PsdEstimator& o)
    {
        if (o.seg_ != seg_) throw std::invalid_argument("psd: segment length mismatch");
        for (std::size_t k = 0; k < seg_; ++k) acc_[k] += o.acc_[k];
        count_ += o.count_;
    }

    double bin_width() const noexcept { return 1.0 / static_cast<double>(seg_); }

    // Density per unit normalized frequency, bins in natural FFT order.
    std::vector<double> power() const
    {
        if (count_ == 0) throw std::logic_error("psd: no segments");
        std::vector<double> p(seg_);
        for (std::size_t k = 0; k < seg_; ++k) p[k] = acc_[k] / (wsum2_ * static_cast<double>(count_));
        return p;
    }

private:
    std::size_t seg_;
    std::vector<double> window_;
    std::vector<double> acc_;
    double wsum2_ = 0.0;
    std::size_t count_ = 0;
};

inline std::vector<double> psd(std::span<const cplx> stream, std::size_t seg_len, Window window = Window::hann)
{
    PsdEstimator est(seg_len, window);
    est.add(stream);
    return est.power();
}

// dB relative to the strongest bin.
inline std::vector<double> normalize_db(const std::vector<double>& power)
{
    const double peak = *std::max_element(power.begin(), power.end());
    std::vector<double> out(power.size());
    for (std::size_t k = 0; k < power.size(); ++k)
        out[k] = power[k] > 0.0 ? 10.0 * std::log10(power[k] / peak) : -std::numeric_limits<double>::infinity();
    return out;
}

// Mean out-of-band density relative to mean in-band density, in dB. In-band is
// the normalized frequency range [0, 1/oversampling).
inline double out_of_band_db(const std::vector<double>& power, std::size_t oversampling)
{
    double in = 0.0, out = 0.0;
    std::size_t n_in = 0, n_out = 0;
    const double edge = 1.0 / static_cast<double>(oversampling);
    for (std::size_t k = 0; k < power.size(); ++k) {
        const double f = static_cast<double>(k) / static_cast<double>(power.size());
        if (f < edge) {
            in += power[k];
            ++n_in;
        } else {
            out += power[k];
            ++n_out;
        }
    }
    if (n_in == 0 || n_out == 0 || in <= 0.0) throw std::invalid_argument("psd: cannot split in/out of band");
    return 10.0 * std::log10((out / static_cast<double>(n_out)) / (in / static_cast<double>(n_in)));
}

// ---------------------------------------------------------------------------
// Accumulator for per-worker reduction.
// ---------------------------------------------------------------------------

struct MetricAccumulator {
    std::vector<double> papr_db;
    double evm_sum = 0.0;
    std::size_t evm_count = 0;
    std::size_t errors = 0;
    std::size_t bits = 0;

    void add_papr(double db) { papr_db.push_back(db); }
    void add_evm(double ratio)
    {
        evm_sum += ratio;
        ++evm_count;
    }
    void add_bits(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx)
    {
        errors += bit_errors(tx, rx);
        bits += tx.size();
    }

    void merge(const MetricAccumulator& o)
    {
        papr_db.insert(papr_db.end(), o.papr_db.begin(), o.papr_db.end());
        evm_sum += o.evm_sum;
        evm_count += o.evm_count;
        errors += o.errors;
        bits += o.bits;
    }

    double evm_db() const
    {
        if (evm_count == 0) throw std::logic_error("evm: no symbols accumulated");
        return evm_db_from_mean(evm_sum / static_cast<double>(evm_count));
    }
    double ber() const
    {
        if (bits == 0) throw std::logic_error("ber: no bits accumulated");
        return static_cast<double>(errors) / static_cast<double>(bits);
    }
    std::vector<CcdfPoint> ccdf(std::span<const double> thresholds_db) const
    {
        return ofdm_papr::ccdf(papr_db, thresholds_db);
    }
};

} // namespace ofdm_papr
