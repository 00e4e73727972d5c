#include "mimolink/source.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "mimolink/errors.hpp"

namespace mimolink {

namespace {
const double kSqrt2 = std::sqrt(2.0);
}

void GaussianSource::validate() const {
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("source length must be even and >= 2, got " + std::to_string(n));
  }
  if (!(variance > 0.0)) {
    throw ConfigError("source variance must be > 0, got " + std::to_string(variance));
  }
}

void LinearCodec::validate() const {
  if (n < 2 || n % 2 != 0) {
    throw ConfigError("codec source length must be even and >= 2, got " + std::to_string(n));
  }
  if (l < 1) throw ConfigError("codec latent length must be >= 1, got " + std::to_string(l));
  if (2 * l > n) {
    throw ConfigError("codec needs 2l <= n, got l=" + std::to_string(l) +
                      ", n=" + std::to_string(n));
  }
}

std::vector<double> sample_source(const GaussianSource& src, const Seed& seed) {
  src.validate();
  Rng rng(seed);
  const double sd = std::sqrt(src.variance);
  std::vector<double> x(static_cast<std::size_t>(src.n));
  for (double& v : x) v = sd * rng.normal();
  return x;
}

std::vector<Complex> pack_symbols(const LinearCodec& codec, std::span<const double> x) {
  codec.validate();
  if (x.size() != static_cast<std::size_t>(codec.n)) {
    throw DimensionError("source vector has length " + std::to_string(x.size()) +
                         ", codec expects " + std::to_string(codec.n));
  }
  std::vector<Complex> z(static_cast<std::size_t>(codec.l));
  for (std::size_t j = 0; j < z.size(); ++j) {
    z[j] = Complex{x[2 * j] / kSqrt2, x[2 * j + 1] / kSqrt2};
  }
  return z;
}

LatentVector encode_source(const LinearCodec& codec, std::span<const double> x) {
  return normalize_latent(pack_symbols(codec, x));
}

std::vector<double> decode_source(const LinearCodec& codec, const EqualizedLatent& z_hat,
                                  double norm_scale) {
  codec.validate();
  if (z_hat.symbols.size() != static_cast<std::size_t>(codec.l)) {
    throw DimensionError("equalized latent has length " +
                         std::to_string(z_hat.symbols.size()) + ", codec expects " +
                         std::to_string(codec.l));
  }
  if (!(norm_scale > 0.0)) throw DegenerateInputError("norm_scale must be > 0");
  std::vector<double> x(static_cast<std::size_t>(codec.n), 0.0);
  const double inv = kSqrt2 / norm_scale;
  for (std::size_t j = 0; j < z_hat.symbols.size(); ++j) {
    x[2 * j] = inv * z_hat.symbols[j].real();
    x[2 * j + 1] = inv * z_hat.symbols[j].imag();
  }
  return x;
}

double analytic_distortion(const LinearCodec& codec, std::span<const double> err_var,
                           double src_variance) {
  codec.validate();
  if (err_var.size() != static_cast<std::size_t>(codec.l)) {
    throw DimensionError("err_var has length " + std::to_string(err_var.size()) +
                         ", codec expects " + std::to_string(codec.l));
  }
  double est_loss = 0.0;
  for (double v : err_var) est_loss += v;
  const double truncated = static_cast<double>(codec.n - 2 * codec.l);
  return (truncated * src_variance + 2.0 * est_loss * src_variance) / codec.n;
}

double psnr(double mse, double max_val) {
  if (mse < 0.0) throw DegenerateInputError("mse must be nonnegative");
  if (!(max_val > 0.0)) throw ConfigError("psnr max_val must be > 0");
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(max_val * max_val / mse);
}

}  // namespace mimolink
