#pragma once

#include <vector>

#include "mimolink/channel.hpp"
#include "mimolink/rng.hpp"

namespace mimolink {

struct CapacityReport {
  std::vector<double> per_realization;  // bits per channel use
  double ergodic_mean = 0.0;
  double ergodic_std = 0.0;
};

// Instantaneous capacity log2 det(I_nt + (P/sigma^2) H^H H) of one fading
// realization, in bits per channel use.
double mimo_capacity(const ChannelState& state, const ChannelParams& params);

// Monte Carlo mean/std over independent channel draws; trial t uses the
// substream (seed.stream, t), so the report is deterministic per seed.
CapacityReport ergodic_capacity(const ChannelParams& params, long trials, const Seed& seed);

// Gaussian rate-distortion proxy for a separation-based benchmark that
// compresses at rate k*C/n bits per real sample: D = var * 2^(-2kC/n).
double separation_distortion(double capacity_bpcu, long k, long n, double src_variance);

}  // namespace mimolink
