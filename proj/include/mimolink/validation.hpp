#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mimolink/receiver.hpp"

namespace mimolink {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Cross-module invariant checks. Each is self-contained, deterministic per
// seed, and validated against an oracle that does not share code with the
// implementation path it checks.

// Gram matrix of the equivalent channel equals gain * I (rel 1e-9) for all
// three orthogonal designs. `block_encoder` is a test seam: passing a
// mutated encoder must make the check fail.
CheckResult check_ostbc_orthogonality(int channels_per_scheme, std::uint64_t seed,
                                      const BlockEncoderFn& block_encoder = {});

// Noiseless-signal estimates equal [P g / (P g + sigma^2)] z (rel 1e-9)
// over random (H, z, P, sigma^2), for all three orthogonal designs.
CheckResult check_ostbc_shrinkage(int draws_per_scheme, std::uint64_t seed);

// Equalizer output matches a direct-inverse Wiener oracle (1e-9), the
// per-stream error variance equals 1/(1+gamma_i) (1e-9), and the empirical
// MSE over `symbols` Monte Carlo symbols is within 3% of the prediction.
CheckResult check_mmse_equalizer(long symbols, std::uint64_t seed);

// Channel moments at `draws` samples: per-entry mean within 0.02 of 0,
// E|h|^2 within 2% of 1, E||H||_F^2 within 2% of nt*nr.
CheckResult check_channel_moments(long draws, std::uint64_t seed);

// End-to-end Monte Carlo MSE matches the analytic distortion within 2%
// over `frames` frames, for the diversity and multiplexing paths at three
// SNR points each.
CheckResult check_distortion_oracle(long frames, std::uint64_t seed);

// Alamouti (nt=2, nr=1) outage: Monte Carlo matches the chi-square(4) CDF
// oracle within 2% at the 10 dB grid point, and the 20->30 dB slope lies
// in [1.6, 2.4] (full diversity nt*nr = 2).
CheckResult check_diversity_slope(long trials, std::uint64_t seed);

// 1x1 ergodic capacity at 0 dB within 2% of the numerical-integration
// oracle (about 0.859 bits per use).
CheckResult check_ergodic_capacity(long trials, std::uint64_t seed);

// Instantaneous capacity matches a closed-form 2x2 eigenvalue oracle
// within 1e-9 over random channels.
CheckResult check_capacity_eigen_oracle(int draws, std::uint64_t seed);

// At 9 dB with nt=2, nr=1: mean Alamouti SINR strictly exceeds the mean
// per-stream MMSE SINR over common channel draws.
CheckResult check_low_snr_ordering(long draws, std::uint64_t seed);

// Runs the fast suite (plus the slow oracles when `full`), printing one
// pass/fail line per invariant. Returns 0 when everything passes, 1
// otherwise.
int run_validation(bool full, std::ostream& out);

}  // namespace mimolink
