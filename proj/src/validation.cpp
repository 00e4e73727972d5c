#include "mimolink/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "mimolink/baseline.hpp"
#include "mimolink/errors.hpp"
#include "mimolink/metrics.hpp"
#include "mimolink/source.hpp"

namespace mimolink {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c);
  return buf;
}

// Plain Gauss-Jordan inverse; deliberately separate from the Cholesky path
// it is used to cross-check.
ComplexMatrix gauss_jordan_inverse(ComplexMatrix a) {
  const std::size_t n = a.rows();
  ComplexMatrix inv = ComplexMatrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    }
    if (std::abs(a(pivot, col)) == 0.0) throw SingularMatrixError("singular in oracle inverse");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const Complex d = a(col, col);
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) /= d;
      inv(col, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const Complex f = a(r, col);
      if (f == Complex{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) -= f * a(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  return inv;
}

// CDF of Gamma(2, 1), i.e. half a chi-square with 4 degrees of freedom:
// the distribution of ||H||_F^2 for a 1x2 Rayleigh channel.
double gamma2_cdf(double u) { return 1.0 - std::exp(-u) * (1.0 + u); }

// Composite Simpson quadrature of log2(1+x) e^-x over [0, upper].
double ergodic_capacity_quadrature() {
  const double upper = 60.0;
  const long intervals = 600000;  // even
  const double h = upper / intervals;
  auto f = [](double x) { return std::log2(1.0 + x) * std::exp(-x); };
  double acc = f(0.0) + f(upper);
  for (long i = 1; i < intervals; ++i) acc += f(i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

std::vector<StmScheme> ostbc_schemes() {
  return {StmScheme::alamouti(), StmScheme::ostbc3_rate12(), StmScheme::ostbc3_rate34()};
}

}  // namespace

CheckResult check_ostbc_orthogonality(int channels_per_scheme, std::uint64_t seed,
                                      const BlockEncoderFn& block_encoder) {
  double worst = 0.0;
  std::string worst_at;
  std::uint64_t stream = 0;
  for (const StmScheme& scheme : ostbc_schemes()) {
    for (int i = 0; i < channels_per_scheme; ++i) {
      const int nr = 1 + i % 4;
      const ChannelParams params{scheme.nt, nr, 1.0, 1.0};
      const ChannelState state =
          sample_channel(params, Seed{seed, combine64(11, stream++)});
      const EquivalentChannel eq =
          build_equivalent_channel(scheme, state, block_encoder);
      const RealMatrix gram = matmul(transpose(eq.a), eq.a);
      double err = 0.0;
      for (std::size_t r = 0; r < gram.rows(); ++r) {
        for (std::size_t c = 0; c < gram.cols(); ++c) {
          const double want = (r == c) ? eq.gain : 0.0;
          err = std::max(err, std::abs(gram(r, c) - want));
        }
      }
      const double rel = err / std::max(eq.gain, 1e-300);
      if (rel > worst) {
        worst = rel;
        worst_at = scheme.name();
      }
    }
  }
  const bool pass = worst <= 1e-9;
  return {"ostbc-orthogonality", pass,
          fmt("max |A^T A - g I| / g = %.3g", worst) +
              (worst_at.empty() ? "" : " (" + worst_at + ")")};
}

CheckResult check_ostbc_shrinkage(int draws_per_scheme, std::uint64_t seed) {
  double worst = 0.0;
  std::uint64_t stream = 0;
  for (const StmScheme& scheme : ostbc_schemes()) {
    const int bk = scheme.symbols_per_block();
    for (int i = 0; i < draws_per_scheme; ++i) {
      Rng rng(Seed{seed, combine64(23, stream++)});
      const int nr = 1 + i % 4;
      const double power = 0.1 + 5.0 * rng.uniform01();
      const double noise_var = 0.01 + 2.0 * rng.uniform01();
      ChannelParams params{scheme.nt, nr, power, noise_var, true};
      const ChannelState state =
          sample_channel(params, Seed{seed, combine64(29, stream++)});

      std::vector<Complex> raw(static_cast<std::size_t>(2 * bk));
      for (Complex& z : raw) z = rng.complex_normal();
      const LatentVector z = normalize_latent(raw);
      const EncodedFrame frame = encode(scheme, z);
      const ComplexMatrix y = transmit(frame.s, state, params, Seed{seed, 0});
      const EqualizedLatent est = ostbc_decode(scheme, y, state, params, z.size());

      const double g =
          ostbc_gain_per_unit_channel(scheme.kind) * frobenius_norm_sq(state.h);
      const double shrink = power * g / (power * g + noise_var);
      double num = 0.0, den = 0.0;
      for (std::size_t s = 0; s < z.size(); ++s) {
        num += std::norm(est.symbols[s] - shrink * z.symbols[s]);
        den += std::norm(shrink * z.symbols[s]);
      }
      worst = std::max(worst, std::sqrt(num / std::max(den, 1e-300)));
    }
  }
  const bool pass = worst <= 1e-9;
  return {"ostbc-shrinkage", pass, fmt("max relative deviation = %.3g", worst)};
}

CheckResult check_mmse_equalizer(long symbols, std::uint64_t seed) {
  // Part 1: Wiener oracle and SINR identity over random shapes.
  double worst_filter = 0.0, worst_identity = 0.0;
  for (int i = 0; i < 200; ++i) {
    Rng rng(Seed{seed, combine64(31, static_cast<std::uint64_t>(i))});
    const int nt = 1 + i % 3;
    const int nr = 1 + (i / 3) % 4;
    const double power = 0.2 + 4.0 * rng.uniform01();
    const double noise_var = 0.05 + 2.0 * rng.uniform01();
    const ChannelParams params{nt, nr, power, noise_var};
    const ChannelState state =
        sample_channel(params, Seed{seed, combine64(37, static_cast<std::uint64_t>(i))});

    const std::size_t k = 5;
    ComplexMatrix y(static_cast<std::size_t>(nr), k);
    for (std::size_t r = 0; r < y.rows(); ++r)
      for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) = rng.complex_normal();

    const EqualizedLatent z = mmse_equalize(y, state, params);

    // Oracle: W = P H^H (P H H^H + sigma^2 I)^-1 applied per column.
    ComplexMatrix m = scale(matmul(state.h, hermitian(state.h)), power);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, r) += noise_var;
    const ComplexMatrix w = scale(matmul(hermitian(state.h), gauss_jordan_inverse(m)), power);
    const ComplexMatrix z_oracle = matmul(w, y);
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      for (int s = 0; s < nt; ++s) {
        num += std::norm(z.symbols[c * nt + s] - z_oracle(s, c));
        den += std::norm(z_oracle(s, c));
      }
    }
    worst_filter = std::max(worst_filter, std::sqrt(num / std::max(den, 1e-300)));

    const std::vector<double> gammas = sinr_mmse_all_streams(state, params);
    for (int s = 0; s < nt; ++s) {
      const double predicted = 1.0 / (1.0 + gammas[static_cast<std::size_t>(s)]);
      worst_identity = std::max(
          worst_identity, std::abs(predicted - z.per_symbol_err_var[static_cast<std::size_t>(s)]) /
                              predicted);
    }
  }

  // Part 2: empirical MSE against the prediction at P = 1, with the frame
  // normalized to the power budget exactly as the transmit pipeline does.
  const ChannelParams params{2, 2, 1.0, 0.4};
  const ChannelState state = sample_channel(params, Seed{seed, 41});
  const long k = symbols / 2;
  Rng rng(Seed{seed, 43});
  ComplexMatrix zs(2, static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < zs.cols(); ++c)
    for (std::size_t r = 0; r < 2; ++r) zs(r, c) = rng.complex_normal();
  zs = scale(zs, std::sqrt(2.0 * static_cast<double>(k) / frobenius_norm_sq(zs)));
  const ComplexMatrix y = transmit(zs, state, params, Seed{seed, 47});
  const EqualizedLatent est = mmse_equalize(y, state, params);
  double emp[2] = {0.0, 0.0};
  for (long c = 0; c < k; ++c) {
    for (std::size_t s = 0; s < 2; ++s) {
      emp[s] += std::norm(est.symbols[static_cast<std::size_t>(c) * 2 + s] -
                          zs(s, static_cast<std::size_t>(c)));
    }
  }
  double worst_mse = 0.0;
  for (std::size_t s = 0; s < 2; ++s) {
    emp[s] /= static_cast<double>(k);
    const double predicted = est.per_symbol_err_var[s];
    worst_mse = std::max(worst_mse, std::abs(emp[s] - predicted) / predicted);
  }

  const bool pass = worst_filter <= 1e-9 && worst_identity <= 1e-9 && worst_mse <= 0.03;
  return {"mmse-equalizer", pass,
          fmt("wiener dev %.3g, sinr-identity dev %.3g, empirical-mse dev %.3g",
              worst_filter, worst_identity, worst_mse)};
}

CheckResult check_channel_moments(long draws, std::uint64_t seed) {
  // 1x1 entry moments.
  ChannelParams p11{1, 1, 1.0, 1.0};
  Complex mean{0.0, 0.0};
  double pow_acc = 0.0;
  for (long t = 0; t < draws; ++t) {
    const ChannelState s =
        sample_channel(p11, Seed{seed, combine64(53, static_cast<std::uint64_t>(t))});
    mean += s.h(0, 0);
    pow_acc += std::norm(s.h(0, 0));
  }
  mean /= static_cast<double>(draws);
  pow_acc /= static_cast<double>(draws);

  // 2x2 frame energy.
  ChannelParams p22{2, 2, 1.0, 1.0};
  double frob = 0.0;
  for (long t = 0; t < draws; ++t) {
    const ChannelState s =
        sample_channel(p22, Seed{seed, combine64(59, static_cast<std::uint64_t>(t))});
    frob += frobenius_norm_sq(s.h);
  }
  frob /= static_cast<double>(draws);

  const bool pass = std::abs(mean) <= 0.02 && std::abs(pow_acc - 1.0) <= 0.02 &&
                    std::abs(frob - 4.0) / 4.0 <= 0.02;
  return {"channel-moments", pass,
          fmt("|mean| = %.4f, E|h|^2 = %.4f, E||H||_F^2 = %.4f", std::abs(mean),
              pow_acc, frob)};
}

CheckResult check_distortion_oracle(long frames, std::uint64_t seed) {
  const double snrs[] = {4.0, 10.0, 16.0};
  const StmScheme schemes[] = {StmScheme::alamouti(), StmScheme::multiplexing(2)};
  double worst = 0.0;
  std::string detail;
  for (const StmScheme& scheme : schemes) {
    for (double snr : snrs) {
      const long n = 64;
      const long k = scheme.is_ostbc() ? 32 : 16;
      const long l = latent_length(scheme, k);
      const GaussianSource src{n, 1.0};
      const LinearCodec codec{n, l};
      const ChannelParams params{scheme.nt, 2, 1.0, noise_var_for_snr(snr, scheme.nt, 1.0)};
      double mc = 0.0, analytic = 0.0;
      for (long t = 0; t < frames; ++t) {
        const std::uint64_t tt = static_cast<std::uint64_t>(t);
        const ChannelState state =
            sample_channel(params, Seed{seed, derive_stream(kStreamChannel, 2, tt)});
        const std::vector<double> x =
            sample_source(src, Seed{seed, derive_stream(kStreamSource, 0, tt)});
        const LatentVector z = encode_source(codec, x);
        const EncodedFrame frame = encode(scheme, z, k);
        const ComplexMatrix y = transmit(
            frame.s, state, params,
            Seed{seed, derive_stream(kStreamNoise, static_cast<std::uint64_t>(snr * 256) +
                                                       (scheme.is_ostbc() ? 1u : 0u),
                                     tt)});
        EqualizedLatent z_hat;
        if (scheme.is_ostbc()) {
          z_hat = ostbc_decode(scheme, y, state, params, z.size());
        } else {
          z_hat = mmse_equalize(y, state, params);
        }
        const std::vector<double> x_hat = decode_source(codec, z_hat, z.norm_scale);
        double se = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
          const double d = x[i] - x_hat[i];
          se += d * d;
        }
        mc += se / static_cast<double>(n);
        analytic += analytic_distortion(codec, z_hat.per_symbol_err_var, 1.0);
      }
      mc /= static_cast<double>(frames);
      analytic /= static_cast<double>(frames);
      const double rel = std::abs(mc - analytic) / analytic;
      if (rel > worst) {
        worst = rel;
        detail = fmt("worst at %.0f dB ", snr) + scheme.name();
      }
    }
  }
  const bool pass = worst <= 0.02;
  return {"distortion-analytic-vs-mc", pass, fmt("max deviation %.4f%% ", worst * 100.0) + detail};
}

CheckResult check_diversity_slope(long trials, std::uint64_t seed) {
  const StmScheme scheme = StmScheme::alamouti();
  const double grid[] = {10.0, 20.0, 30.0};
  const double threshold_db = 13.0;
  const OutageCurve curve =
      outage_curve(scheme, 1, 1.0, grid, threshold_db, trials, Seed{seed, 61});

  // Oracle: gamma = P ||H||^2 / sigma^2 with ||H||^2 ~ Gamma(2,1); outage
  // is the Gamma CDF at threshold * sigma^2 / P.
  const double tau = std::pow(10.0, threshold_db / 10.0);
  double worst_cdf = 0.0;
  double oracle10 = 0.0;
  for (std::size_t i = 0; i < curve.prob.size(); ++i) {
    const double sigma2 = noise_var_for_snr(curve.snr_grid_db[i], 2, 1.0);
    const double expected = gamma2_cdf(tau * sigma2);
    if (i == 0) {
      oracle10 = expected;
      worst_cdf = std::abs(curve.prob[i] - expected) / expected;
    }
  }
  const double slope = diversity_order_estimate(curve, 1, 2);
  const bool pass = worst_cdf <= 0.02 && slope >= 1.6 && slope <= 2.4;
  return {"diversity-slope", pass,
          fmt("slope(20->30 dB) = %.3f, outage(10 dB) = %.5f vs oracle %.5f",
              slope, curve.prob[0], oracle10)};
}

CheckResult check_ergodic_capacity(long trials, std::uint64_t seed) {
  const ChannelParams params{1, 1, 1.0, 1.0};  // P/sigma^2 = 1, i.e. 0 dB
  const CapacityReport report = ergodic_capacity(params, trials, Seed{seed, 67});
  const double oracle = ergodic_capacity_quadrature();
  const double rel = std::abs(report.ergodic_mean - oracle) / oracle;
  const bool pass = rel <= 0.02;
  return {"ergodic-capacity", pass,
          fmt("mc %.5f vs quadrature %.5f (dev %.3f%%)", report.ergodic_mean, oracle,
              rel * 100.0)};
}

CheckResult check_capacity_eigen_oracle(int draws, std::uint64_t seed) {
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    Rng rng(Seed{seed, combine64(71, static_cast<std::uint64_t>(i))});
    const double power = 0.2 + 4.0 * rng.uniform01();
    const double noise_var = 0.05 + 2.0 * rng.uniform01();
    const ChannelParams params{2, 2, power, noise_var};
    const ChannelState state =
        sample_channel(params, Seed{seed, combine64(73, static_cast<std::uint64_t>(i))});

    // Closed-form eigenvalues of the 2x2 Hermitian H^H H.
    const ComplexMatrix g = matmul(hermitian(state.h), state.h);
    const double tr = g(0, 0).real() + g(1, 1).real();
    const double det = g(0, 0).real() * g(1, 1).real() - std::norm(g(0, 1));
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    const double l1 = (tr + disc) / 2.0, l2 = (tr - disc) / 2.0;
    const double rho = power / noise_var;
    const double oracle = std::log2(1.0 + rho * l1) + std::log2(1.0 + rho * l2);

    const double got = mimo_capacity(state, params);
    worst = std::max(worst, std::abs(got - oracle) / std::max(oracle, 1e-300));
  }
  const bool pass = worst <= 1e-9;
  return {"capacity-eigen-oracle", pass, fmt("max relative deviation %.3g", worst)};
}

CheckResult check_low_snr_ordering(long draws, std::uint64_t seed) {
  const double snr = 9.0;
  const ChannelParams params{2, 1, 1.0, noise_var_for_snr(snr, 2, 1.0)};
  const StmScheme alamouti = StmScheme::alamouti();
  double div_acc = 0.0, mux_acc = 0.0;
  for (long t = 0; t < draws; ++t) {
    const ChannelState state = sample_channel(
        params, Seed{seed, derive_stream(kStreamChannel, 1, static_cast<std::uint64_t>(t))});
    div_acc += sinr_diversity(state, params, alamouti);
    const std::vector<double> streams = sinr_mmse_all_streams(state, params);
    double acc = 0.0;
    for (double v : streams) acc += v;
    mux_acc += acc / streams.size();
  }
  div_acc /= static_cast<double>(draws);
  mux_acc /= static_cast<double>(draws);
  const bool pass = div_acc > mux_acc;
  return {"low-snr-ordering", pass,
          fmt("mean diversity SINR %.3f vs mean per-stream MMSE SINR %.3f at 9 dB",
              div_acc, mux_acc)};
}

int run_validation(bool full, std::ostream& out) {
  std::vector<CheckResult> results;
  results.push_back(check_ostbc_orthogonality(200, 101));
  results.push_back(check_ostbc_shrinkage(300, 103));
  results.push_back(check_mmse_equalizer(100000, 107));
  results.push_back(check_channel_moments(100000, 109));
  results.push_back(check_distortion_oracle(100000, 113));
  if (full) {
    results.push_back(check_diversity_slope(1000000, 127));
    results.push_back(check_ergodic_capacity(100000, 131));
  }
  bool all = true;
  for (const CheckResult& r : results) {
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
    all = all && r.pass;
  }
  out << (all ? "validation passed" : "validation FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace mimolink
