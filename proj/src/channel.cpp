#include "mimolink/channel.hpp"

#include <cmath>
#include <string>

#include "mimolink/errors.hpp"

namespace mimolink {

namespace {
constexpr double kFramePowerTol = 1e-6;
}

void ChannelParams::validate() const {
  if (nt < 1) throw ConfigError("nt must be >= 1, got " + std::to_string(nt));
  if (nr < 1) throw ConfigError("nr must be >= 1, got " + std::to_string(nr));
  if (!(power > 0.0)) throw ConfigError("power must be > 0, got " + std::to_string(power));
  if (noiseless) {
    if (noise_var < 0.0) throw ConfigError("noise_var must be >= 0 in noiseless mode");
  } else if (!(noise_var > 0.0)) {
    throw ConfigError("noise_var must be > 0, got " + std::to_string(noise_var));
  }
}

ChannelState sample_channel(const ChannelParams& params, const Seed& seed) {
  params.validate();
  Rng rng(seed);
  ComplexMatrix h(static_cast<std::size_t>(params.nr), static_cast<std::size_t>(params.nt));
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) = rng.complex_normal();
  return ChannelState{std::move(h)};
}

ComplexMatrix transmit(const ComplexMatrix& s, const ChannelState& state,
                       const ChannelParams& params, const Seed& seed) {
  params.validate();
  if (s.rows() != static_cast<std::size_t>(params.nt) ||
      state.h.cols() != s.rows() ||
      state.h.rows() != static_cast<std::size_t>(params.nr)) {
    throw DimensionError("transmit shape mismatch: H is " +
                         std::to_string(state.h.rows()) + "x" +
                         std::to_string(state.h.cols()) + ", S is " +
                         std::to_string(s.rows()) + "x" + std::to_string(s.cols()) +
                         ", params say nt=" + std::to_string(params.nt) +
                         " nr=" + std::to_string(params.nr));
  }
  const double frame_budget = static_cast<double>(params.nt) * static_cast<double>(s.cols());
  const double frame_power = frobenius_norm_sq(s);
  if (frame_power > frame_budget + kFramePowerTol) {
    throw DegenerateInputError("frame power " + std::to_string(frame_power) +
                               " exceeds budget nt*k = " + std::to_string(frame_budget));
  }

  ComplexMatrix y = scale(matmul(state.h, s), std::sqrt(params.power));
  if (!params.noiseless) {
    Rng rng(seed);
    const double sigma = std::sqrt(params.noise_var);
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += sigma * rng.complex_normal();
  }
  return y;
}

double snr_db(const ChannelParams& params) {
  return 10.0 * std::log10(params.power / (params.nt * params.noise_var));
}

double noise_var_for_snr(double snr_db, int nt, double power) {
  return power / (nt * std::pow(10.0, snr_db / 10.0));
}

}  // namespace mimolink
