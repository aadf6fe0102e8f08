#pragma once

#include <cmath>
#include <stdexcept>

#include "carrier_plan.hpp"
#include "papr.hpp"
#include "signal.hpp"
#include "transform.hpp"

namespace ofdm_papr {

struct RcfParams {
    double target_papr_db = 4.0;
    int iterations = 10;

    void validate() const
    {
        if (iterations < 1) throw std::invalid_argument("rcf: iterations must be >= 1");
        if (!(target_papr_db > 0.0)) throw std::invalid_argument("rcf: target must be > 0 dB");
    }
};

struct RcfResult {
    TimeSymbol x;
    FreqSymbol c;
    int clipped_passes = 0;
};

// Polar clip: samples above `level` keep their phase and are pulled to `level`.
inline TimeSymbol clip_amplitude(TimeSymbol x, double level)
{
    for (auto& v : x) {
        const double m = std::abs(v);
        if (m > level) v *= level / m;
    }
    return x;
}

// Repeated clipping and filtering. The threshold follows the mean power of
// the current iterate; the filter keeps the N in-band bins and zeroes the
// free carriers.
inline RcfResult rcf(const FreqSymbol& c_o, const CarrierPlan& plan, const RcfParams& params,
                     std::size_t oversampling)
{
    params.validate();
    if (plan.free_energy(c_o) != 0.0) throw std::invalid_argument("rcf: c_o has energy on free carriers");
    const auto& tf = cached_transform(plan.n_carriers(), oversampling);
    const double target = db_to_linear(params.target_papr_db);

    RcfResult out{tf.ifft(c_o), c_o, 0};
    for (int it = 0; it < params.iterations; ++it) {
        const double mean_power = squared_norm(out.x) / static_cast<double>(out.x.size());
        const double level = std::sqrt(target * mean_power);
        if (norm_inf(out.x) <= level) break;
        ++out.clipped_passes;
        out.c = plan.mask_data(tf.fft(clip_amplitude(out.x, level)));
        out.x = tf.ifft(out.c);
    }
    return out;
}

} // namespace ofdm_papr
