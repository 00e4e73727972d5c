#pragma once

#include <span>
#include <vector>

#include "mimolink/channel.hpp"
#include "mimolink/rng.hpp"
#include "mimolink/stm.hpp"

namespace mimolink {

// Post-detection SINR of the diversity path: gamma = P * g / sigma^2 with
// g the equivalent-channel gain (N/K * ||H||_F^2 for the orthogonal
// designs; Alamouti reduces to P ||H||_F^2 / sigma^2).
double sinr_diversity(const ChannelState& state, const ChannelParams& params,
                      const StmScheme& scheme);

// Per-stream SINR of the MMSE-equalized multiplexing path:
// gamma_i = 1 / [(I + (P/sigma^2) H^H H)^-1]_ii - 1.
double sinr_mmse_stream(const ChannelState& state, const ChannelParams& params, int stream);
std::vector<double> sinr_mmse_all_streams(const ChannelState& state,
                                          const ChannelParams& params);

struct OutageCurve {
  std::vector<double> snr_grid_db;
  std::vector<double> prob;
  double threshold_db = 0.0;
  long trials = 0;
};

// Fraction of channel draws whose scheme SINR (minimum over streams for
// multiplexing) falls below the threshold. Channel draws depend only on
// (seed, trial index), so calls at different SNRs see common realizations.
double outage_probability(const StmScheme& scheme, const ChannelParams& params,
                          double threshold_db, long trials, const Seed& seed);

OutageCurve outage_curve(const StmScheme& scheme, int nr, double power,
                         std::span<const double> snr_grid_db, double threshold_db,
                         long trials, const Seed& seed);

// Two-point log-log slope of the outage curve between grid indices lo, hi.
double diversity_order_estimate(const OutageCurve& curve, std::size_t lo_idx,
                                std::size_t hi_idx);

}  // namespace mimolink
