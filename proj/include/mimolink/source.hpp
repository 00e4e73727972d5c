#pragma once

#include <span>
#include <vector>

#include "mimolink/receiver.hpp"
#include "mimolink/rng.hpp"
#include "mimolink/stm.hpp"

namespace mimolink {

// Analytic stand-in for a learned codec: an i.i.d. Gaussian source with a
// linear pair-packing codec, so end-to-end distortion has a closed form.
struct GaussianSource {
  long n = 0;              // real samples per frame, even
  double variance = 1.0;

  void validate() const;
};

// Packs the first 2l source coordinates into l complex symbols; the rest
// are dropped and reconstructed at their prior mean.
struct LinearCodec {
  long n = 0;
  long l = 0;

  void validate() const;  // requires 2l <= n
};

struct DistortionReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  double analytic_mse = 0.0;
};

std::vector<double> sample_source(const GaussianSource& src, const Seed& seed);

// z_j = (x_{2j-1} + i x_{2j}) / sqrt(2), j = 1..l. Unit symbol variance for
// a unit-variance source; no normalization applied here.
std::vector<Complex> pack_symbols(const LinearCodec& codec, std::span<const double> x);

// pack_symbols followed by normalize_latent.
LatentVector encode_source(const LinearCodec& codec, std::span<const double> x);

// Unpacks the estimates back to n reals, dividing out the normalization
// factor recorded at encode time. Dropped coordinates are filled with 0.
std::vector<double> decode_source(const LinearCodec& codec, const EqualizedLatent& z_hat,
                                  double norm_scale);

// Closed-form per-frame distortion given the receiver's per-symbol error
// variances: truncation loss plus estimation loss.
double analytic_distortion(const LinearCodec& codec, std::span<const double> err_var,
                           double src_variance);

// 10 log10(max_val^2 / mse); +infinity sentinel for mse == 0.
double psnr(double mse, double max_val);

}  // namespace mimolink
