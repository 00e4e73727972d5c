#pragma once

#include "mimolink/complex_matrix.hpp"
#include "mimolink/rng.hpp"

namespace mimolink {

// Block Rayleigh fading MIMO link parameters. `power` is the per-antenna
// symbol power P; `noise_var` the complex noise variance per receive
// antenna. The average SNR is P / (nt * noise_var).
//
// `noiseless` selects an exact zero-noise mode used by oracle tests; it is
// the only mode in which noise_var == 0 is accepted.
struct ChannelParams {
  int nt = 1;
  int nr = 1;
  double power = 1.0;
  double noise_var = 1.0;
  bool noiseless = false;

  void validate() const;
};

// One fading realization: H is nr x nt with i.i.d. unit-variance complex
// Gaussian entries, constant over a frame.
struct ChannelState {
  ComplexMatrix h;
};

ChannelState sample_channel(const ChannelParams& params, const Seed& seed);

// Y = sqrt(P) H S + N. S must be nt x k with frame power at most nt*k
// (small tolerance for rounding). Deterministic per seed.
ComplexMatrix transmit(const ComplexMatrix& s, const ChannelState& state,
                       const ChannelParams& params, const Seed& seed);

double snr_db(const ChannelParams& params);
double noise_var_for_snr(double snr_db, int nt, double power);

}  // namespace mimolink
