#pragma once

#include "ofdm_papr/admm_direct.hpp"
#include "ofdm_papr/admm_params.hpp"
#include "ofdm_papr/admm_relax.hpp"
#include "ofdm_papr/carrier_plan.hpp"
#include "ofdm_papr/channel.hpp"
#include "ofdm_papr/constellation.hpp"
#include "ofdm_papr/errors.hpp"
#include "ofdm_papr/metrics.hpp"
#include "ofdm_papr/papr.hpp"
#include "ofdm_papr/parallel.hpp"
#include "ofdm_papr/rcf.hpp"
#include "ofdm_papr/rng.hpp"
#include "ofdm_papr/signal.hpp"
#include "ofdm_papr/subproblems.hpp"
#include "ofdm_papr/transform.hpp"
