#include "mimolink/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mimolink/errors.hpp"

namespace mimolink {

double sinr_diversity(const ChannelState& state, const ChannelParams& params,
                      const StmScheme& scheme) {
  scheme.validate();
  if (!scheme.is_ostbc()) {
    throw ConfigError("sinr_diversity applies to OSTBC schemes; "
                      "use sinr_mmse_stream for multiplexing");
  }
  if (!(params.noise_var > 0.0)) throw ConfigError("sinr needs noise_var > 0");
  const double g = ostbc_gain_per_unit_channel(scheme.kind) * frobenius_norm_sq(state.h);
  return params.power * g / params.noise_var;
}

std::vector<double> sinr_mmse_all_streams(const ChannelState& state,
                                          const ChannelParams& params) {
  if (!(params.noise_var > 0.0)) throw ConfigError("sinr needs noise_var > 0");
  const ComplexMatrix& h = state.h;
  const std::size_t nt = h.cols();
  ComplexMatrix e = scale(matmul(hermitian(h), h), params.power / params.noise_var);
  for (std::size_t i = 0; i < nt; ++i) e(i, i) += 1.0;
  const ComplexMatrix inv = solve_hpd(e, ComplexMatrix::identity(nt));
  std::vector<double> out(nt);
  for (std::size_t i = 0; i < nt; ++i) out[i] = 1.0 / inv(i, i).real() - 1.0;
  return out;
}

double sinr_mmse_stream(const ChannelState& state, const ChannelParams& params, int stream) {
  const std::size_t nt = state.h.cols();
  if (stream < 0 || static_cast<std::size_t>(stream) >= nt) {
    throw ConfigError("stream index " + std::to_string(stream) + " out of range [0, " +
                      std::to_string(nt) + ")");
  }
  return sinr_mmse_all_streams(state, params)[static_cast<std::size_t>(stream)];
}

double outage_probability(const StmScheme& scheme, const ChannelParams& params,
                          double threshold_db, long trials, const Seed& seed) {
  scheme.validate();
  if (trials < 1000) throw ConfigError("outage estimation needs >= 1000 trials");
  const double threshold = std::pow(10.0, threshold_db / 10.0);
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    const Seed s{seed.master,
                 derive_stream(kStreamChannel, static_cast<std::uint64_t>(params.nr),
                               combine64(seed.stream, static_cast<std::uint64_t>(t)))};
    const ChannelState state = sample_channel(params, s);
    double gamma;
    if (scheme.is_ostbc()) {
      gamma = sinr_diversity(state, params, scheme);
    } else {
      const std::vector<double> per_stream = sinr_mmse_all_streams(state, params);
      gamma = *std::min_element(per_stream.begin(), per_stream.end());
    }
    if (gamma < threshold) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

OutageCurve outage_curve(const StmScheme& scheme, int nr, double power,
                         std::span<const double> snr_grid_db, double threshold_db,
                         long trials, const Seed& seed) {
  OutageCurve curve;
  curve.snr_grid_db.assign(snr_grid_db.begin(), snr_grid_db.end());
  curve.threshold_db = threshold_db;
  curve.trials = trials;
  for (double snr : snr_grid_db) {
    ChannelParams params{scheme.nt, nr, power, noise_var_for_snr(snr, scheme.nt, power)};
    // Same seed at each grid point: common channel draws across the curve.
    curve.prob.push_back(outage_probability(scheme, params, threshold_db, trials, seed));
  }
  return curve;
}

double diversity_order_estimate(const OutageCurve& curve, std::size_t lo_idx,
                                std::size_t hi_idx) {
  if (lo_idx >= hi_idx || hi_idx >= curve.prob.size()) {
    throw ConfigError("diversity slope needs lo < hi within the grid");
  }
  if (!(curve.snr_grid_db[hi_idx] > curve.snr_grid_db[lo_idx])) {
    throw ConfigError("snr grid must be strictly increasing");
  }
  const double p_lo = curve.prob[lo_idx];
  const double p_hi = curve.prob[hi_idx];
  if (!(p_lo > 0.0 && p_lo < 1.0 && p_hi > 0.0 && p_hi < 1.0)) {
    throw InsufficientTrialsError(
        "outage probabilities must lie in (0,1) for a slope estimate; got " +
        std::to_string(p_lo) + " and " + std::to_string(p_hi));
  }
  const double dlog_p = std::log10(p_hi) - std::log10(p_lo);
  const double dlog_snr = (curve.snr_grid_db[hi_idx] - curve.snr_grid_db[lo_idx]) / 10.0;
  return -dlog_p / dlog_snr;
}

}  // namespace mimolink
