#include "mimolink/baseline.hpp"

#include <cmath>
#include <string>

#include "mimolink/errors.hpp"

namespace mimolink {

double mimo_capacity(const ChannelState& state, const ChannelParams& params) {
  params.validate();
  if (!(params.noise_var > 0.0)) {
    throw ConfigError("mimo_capacity needs noise_var > 0");
  }
  const std::size_t nt = state.h.cols();
  ComplexMatrix m = scale(matmul(hermitian(state.h), state.h),
                          params.power / params.noise_var);
  for (std::size_t i = 0; i < nt; ++i) m(i, i) += 1.0;
  return logdet_hpd(m);
}

CapacityReport ergodic_capacity(const ChannelParams& params, long trials, const Seed& seed) {
  if (trials < 1) throw ConfigError("trials must be >= 1, got " + std::to_string(trials));
  CapacityReport report;
  report.per_realization.resize(static_cast<std::size_t>(trials));
  for (long t = 0; t < trials; ++t) {
    const ChannelState state =
        sample_channel(params, substream(seed, static_cast<std::uint64_t>(t)));
    report.per_realization[static_cast<std::size_t>(t)] = mimo_capacity(state, params);
  }
  double sum = 0.0;
  for (double c : report.per_realization) sum += c;
  report.ergodic_mean = sum / trials;
  if (trials > 1) {
    double ss = 0.0;
    for (double c : report.per_realization) {
      const double d = c - report.ergodic_mean;
      ss += d * d;
    }
    report.ergodic_std = std::sqrt(ss / (trials - 1));
  }
  return report;
}

double separation_distortion(double capacity_bpcu, long k, long n, double src_variance) {
  if (n < 1) throw ConfigError("n must be >= 1, got " + std::to_string(n));
  if (k < 1) throw ConfigError("k must be >= 1, got " + std::to_string(k));
  if (capacity_bpcu < 0.0) throw ConfigError("capacity must be nonnegative");
  const double rate = static_cast<double>(k) * capacity_bpcu / static_cast<double>(n);
  return src_variance * std::pow(2.0, -2.0 * rate);
}

}  // namespace mimolink
