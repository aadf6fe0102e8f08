// Reduce the PAPR of one random 16-QAM symbol with both ADMM engines.

#include <cstdio>

#include "ofdm_papr.hpp"

int main()
{
    using namespace ofdm_papr;

    const auto plan = CarrierPlan::wifi_default();
    const Constellation qam(Modulation::qam16);
    auto rng = symbol_stream(7, stream::bits, 0);
    const auto c_o = map_bits(random_bits(rng, plan.n_data() * qam.bits_per_symbol()), qam, plan);

    AdmmParams params;
    params.alpha = db_to_linear(4.0);
    params.beta = 0.15;

    const auto x_o = ifft_oversampled(c_o, params.oversampling);
    std::printf("original   PAPR %.3f dB\n", papr_db(x_o));

    const auto direct = direct_solve(c_o, plan, params);
    std::printf("direct     PAPR %.3f dB  EVM %.2f dB  (%zu iterations)\n", papr_db(direct.x),
                evm_db_from_mean(evm_ratio(direct.c, c_o, plan)), direct.report.trace.size());

    params.rho = 300.0;
    params.rho_tilde = 100.0;
    const auto relax = relax_solve(c_o, plan, params);
    std::printf("relax      PAPR %.3f dB  EVM %.2f dB  consensus gap %.3g\n", papr_db(relax.x),
                evm_db_from_mean(evm_ratio(relax.c, c_o, plan)), relax.report.consensus_gap);
}
