#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mimolink/receiver.hpp"
#include "oracle_helpers.hpp"

using namespace mimolink;
using oracles::rel_err;

namespace {

std::vector<Complex> random_symbols(std::size_t n, Rng& rng) {
  std::vector<Complex> v(n);
  for (Complex& z : v) z = rng.complex_normal();
  return v;
}

ComplexMatrix column(const ComplexMatrix& m, std::size_t c) {
  ComplexMatrix out(m.rows(), 1);
  for (std::size_t r = 0; r < m.rows(); ++r) out(r, 0) = m(r, c);
  return out;
}

}  // namespace

TEST_CASE("alamouti decoupling on the hand-worked 1x2 channel") {
  // H = [1, 1], P = 1, noiseless: y1 = z1 + z2, y2 = -z2* + z1*.
  const ChannelState state{ComplexMatrix(1, 2, {Complex{1, 0}, Complex{1, 0}})};
  Rng rng(Seed{3, 1});
  const Complex z1 = rng.complex_normal(), z2 = rng.complex_normal();
  const ComplexMatrix y1(1, 1, {z1 + z2});
  const ComplexMatrix y2(1, 1, {-std::conj(z2) + std::conj(z1)});
  const auto [m1, m2] = alamouti_decouple(y1, y2, state, 1.0);
  CHECK(std::abs(m1 - 2.0 * z1) < 1e-12);
  CHECK(std::abs(m2 - 2.0 * z2) < 1e-12);
}

TEST_CASE("alamouti decoupling reduces to MRC when h_B = 0") {
  Rng rng(Seed{3, 2});
  ComplexMatrix h(2, 2);
  h(0, 0) = rng.complex_normal();
  h(1, 0) = rng.complex_normal();
  const ChannelState state{h};
  const double power = 1.7;
  const Complex z1 = rng.complex_normal(), z2 = rng.complex_normal();
  // y_t = sqrt(P) H s_t with the Alamouti slot columns.
  ComplexMatrix y1(2, 1), y2(2, 1);
  for (std::size_t r = 0; r < 2; ++r) {
    y1(r, 0) = std::sqrt(power) * (h(r, 0) * z1 + h(r, 1) * z2);
    y2(r, 0) = std::sqrt(power) * (h(r, 0) * (-std::conj(z2)) + h(r, 1) * std::conj(z1));
  }
  const auto [m1, m2] = alamouti_decouple(y1, y2, state, power);
  const double g = frobenius_norm_sq(h);
  CHECK(rel_err(m1, power * g * z1) < 1e-12);
  CHECK(rel_err(m2, power * g * z2) < 1e-12);
}

TEST_CASE("alamouti decoupling of the zero latent") {
  const ChannelState state{ComplexMatrix(1, 2, {Complex{2, 1}, Complex{-1, 3}})};
  const ComplexMatrix zero(1, 1);
  const auto [m1, m2] = alamouti_decouple(zero, zero, state, 1.0);
  CHECK(std::abs(m1) == 0.0);
  CHECK(std::abs(m2) == 0.0);
}

TEST_CASE("alamouti decoupling rejects nt != 2") {
  const ChannelState state{ComplexMatrix::identity(3)};
  const ComplexMatrix y(3, 1);
  CHECK_THROWS_AS(alamouti_decouple(y, y, state, 1.0), ConfigError);
}

TEST_CASE("scalar MMSE shrinkage") {
  const Complex m{2.0, 0.0};  // P = 1, g = 2 acting on z1 = 1
  CHECK(std::abs(ostbc_scalar_mmse(m, 2.0, 1.0, 0.0) - Complex{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(ostbc_scalar_mmse(m, 2.0, 1.0, 2.0) - Complex{0.5, 0.0}) < 1e-15);
  CHECK(std::abs(ostbc_scalar_mmse(Complex{0, 0}, 3.0, 1.0, 0.5)) == 0.0);
  // g = 0 with sigma^2 > 0 is m / sigma^2.
  CHECK(std::abs(ostbc_scalar_mmse(m, 0.0, 1.0, 2.0) - Complex{1.0, 0.0}) < 1e-15);
}

TEST_CASE("equivalent channel gain and gram for every design") {
  Rng rng(Seed{3, 3});
  const StmScheme schemes[] = {StmScheme::alamouti(), StmScheme::ostbc3_rate12(),
                               StmScheme::ostbc3_rate34()};
  for (const StmScheme& scheme : schemes) {
    for (int rep = 0; rep < 100; ++rep) {
      const int nr = 1 + rep % 4;
      const ChannelParams params{scheme.nt, nr, 1.0, 1.0};
      const ChannelState state =
          sample_channel(params, Seed{3, static_cast<std::uint64_t>(100 + rep)});
      const EquivalentChannel eq = equivalent_channel(scheme, state);
      if (scheme.kind == SchemeKind::Alamouti) {
        CHECK(std::abs(eq.gain - frobenius_norm_sq(state.h)) <= 1e-10);
      }
      const RealMatrix gram = matmul(transpose(eq.a), eq.a);
      for (std::size_t i = 0; i < gram.rows(); ++i) {
        for (std::size_t j = 0; j < gram.cols(); ++j) {
          const double want = i == j ? eq.gain : 0.0;
          CHECK(std::abs(gram(i, j) - want) <= 1e-9 * std::max(1.0, eq.gain));
        }
      }
    }
  }
}

TEST_CASE("equivalent channel of the zero channel is zero") {
  const ChannelState state{ComplexMatrix(2, 2)};
  const EquivalentChannel eq = equivalent_channel(StmScheme::alamouti(), state);
  CHECK(eq.gain == 0.0);
  for (double v : eq.a.entries()) CHECK(v == 0.0);
}

TEST_CASE("equivalent channel rejects multiplexing") {
  const ChannelState state{ComplexMatrix::identity(2)};
  CHECK_THROWS_AS(equivalent_channel(StmScheme::multiplexing(2), state), ConfigError);
}

TEST_CASE("ostbc_decode equals decouple + scalar MMSE on noisy Alamouti frames") {
  Rng rng(Seed{3, 4});
  for (int rep = 0; rep < 50; ++rep) {
    const int nr = 1 + rep % 4;
    const ChannelParams params{2, nr, 1.3, 0.37};
    const ChannelState state =
        sample_channel(params, Seed{4, static_cast<std::uint64_t>(rep)});
    const LatentVector z = normalize_latent(random_symbols(6, rng));
    const EncodedFrame frame = encode(StmScheme::alamouti(), z);
    const ComplexMatrix y =
        transmit(frame.s, state, params, Seed{5, static_cast<std::uint64_t>(rep)});

    const EqualizedLatent got = ostbc_decode(StmScheme::alamouti(), y, state, params);

    const double g = frobenius_norm_sq(state.h);
    for (std::size_t blk = 0; blk < 3; ++blk) {
      const auto [m1, m2] = alamouti_decouple(column(y, 2 * blk), column(y, 2 * blk + 1),
                                              state, params.power);
      const Complex want1 = ostbc_scalar_mmse(m1, g, params.power, params.noise_var);
      const Complex want2 = ostbc_scalar_mmse(m2, g, params.power, params.noise_var);
      CHECK(std::abs(got.symbols[2 * blk] - want1) < 1e-12);
      CHECK(std::abs(got.symbols[2 * blk + 1] - want2) < 1e-12);
    }
  }
}

TEST_CASE("noiseless shrinkage identity for every OSTBC scheme") {
  Rng rng(Seed{3, 5});
  const StmScheme schemes[] = {StmScheme::alamouti(), StmScheme::ostbc3_rate12(),
                               StmScheme::ostbc3_rate34()};
  for (const StmScheme& scheme : schemes) {
    for (int rep = 0; rep < 40; ++rep) {
      const int nr = 1 + rep % 3;
      const double power = 0.2 + 3.0 * rng.uniform01();
      const double noise_var = 0.05 + 2.0 * rng.uniform01();
      ChannelParams params{scheme.nt, nr, power, noise_var, true};  // noiseless signal
      const ChannelState state =
          sample_channel(params, Seed{6, static_cast<std::uint64_t>(rep)});
      const std::size_t l = static_cast<std::size_t>(2 * scheme.symbols_per_block());
      const LatentVector z = normalize_latent(random_symbols(l, rng));
      const EncodedFrame frame = encode(scheme, z);
      const ComplexMatrix y = transmit(frame.s, state, params, Seed{7, 0});
      const EqualizedLatent est = ostbc_decode(scheme, y, state, params);

      const double g = ostbc_gain_per_unit_channel(scheme.kind) * frobenius_norm_sq(state.h);
      const double shrink = power * g / (power * g + noise_var);
      for (std::size_t i = 0; i < l; ++i) {
        CHECK(std::abs(est.symbols[i] - shrink * z.symbols[i]) <=
              1e-9 * std::max(1.0, std::abs(shrink * z.symbols[i])));
        CHECK(est.per_symbol_gain[i] == doctest::Approx(shrink).epsilon(1e-12));
        CHECK(est.per_symbol_err_var[i] ==
              doctest::Approx(noise_var / (power * g + noise_var)).epsilon(1e-12));
      }
      // With sigma^2 = 0 in the denominator the estimate is exact.
      ChannelParams exact = params;
      exact.noise_var = 0.0;
      const EqualizedLatent ex = ostbc_decode(scheme, y, state, exact);
      for (std::size_t i = 0; i < l; ++i) {
        CHECK(std::abs(ex.symbols[i] - z.symbols[i]) <= 1e-9);
      }
    }
  }
}

TEST_CASE("ostbc_decode of a zero latent is zero") {
  ChannelParams params{2, 2, 1.0, 0.5, true};
  const ChannelState state = sample_channel(params, Seed{8, 0});
  const ComplexMatrix y(2, 4);  // all-zero receive frame
  const EqualizedLatent est = ostbc_decode(StmScheme::alamouti(), y, state, params);
  for (const Complex& s : est.symbols) CHECK(std::abs(s) == 0.0);
}

TEST_CASE("ostbc_decode strips zero padding") {
  Rng rng(Seed{3, 6});
  ChannelParams params{2, 2, 1.0, 0.0, true};
  const ChannelState state = sample_channel(params, Seed{9, 0});
  const LatentVector z = normalize_latent(random_symbols(5, rng));
  const EncodedFrame frame = encode(StmScheme::alamouti(), z);
  const ComplexMatrix y = transmit(frame.s, state, params, Seed{9, 1});
  ChannelParams exact = params;
  exact.noise_var = 0.0;
  const EqualizedLatent est =
      ostbc_decode(StmScheme::alamouti(), y, state, exact, frame.latent_len);
  REQUIRE(est.symbols.size() == 5);
  for (std::size_t i = 0; i < 5; ++i)
    CHECK(std::abs(est.symbols[i] - z.symbols[i]) <= 1e-9);
}

TEST_CASE("ostbc_decode rejects bad shapes") {
  ChannelParams params{2, 2, 1.0, 0.5};
  const ChannelState state = sample_channel(params, Seed{10, 0});
  CHECK_THROWS_AS(ostbc_decode(StmScheme::alamouti(), ComplexMatrix(2, 3), state, params),
                  DimensionError);
  CHECK_THROWS_AS(ostbc_decode(StmScheme::alamouti(), ComplexMatrix(3, 4), state, params),
                  DimensionError);
}

TEST_CASE("mmse_equalize scalar case") {
  // nr = nt = 1, h = 1, P = sigma^2: z = y / 2.
  const ChannelState state{ComplexMatrix::identity(1)};
  const ChannelParams params{1, 1, 0.8, 0.8};
  const ComplexMatrix y(1, 3, {Complex{1, 1}, Complex{-2, 0.5}, Complex{0, -3}});
  const EqualizedLatent est = mmse_equalize(y, state, params);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::abs(est.symbols[i] - y(0, i) / 2.0) < 1e-12);
}

TEST_CASE("mmse_equalize approaches identity at high SNR") {
  const ChannelState state{ComplexMatrix::identity(2)};
  const ChannelParams params{2, 2, 1.0, 1e-12};
  Rng rng(Seed{11, 0});
  const ComplexMatrix y = oracles::random_matrix(2, 4, rng);
  const EqualizedLatent est = mmse_equalize(y, state, params);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t s = 0; s < 2; ++s)
      CHECK(std::abs(est.symbols[c * 2 + s] - y(s, c)) < 1e-9);
}

TEST_CASE("mmse_equalize matches the direct Wiener oracle") {
  Rng rng(Seed{11, 1});
  for (int rep = 0; rep < 50; ++rep) {
    const double power = 0.3 + 4.0 * rng.uniform01();
    const double noise_var = 0.05 + 2.0 * rng.uniform01();
    const ChannelParams params{2, 2, power, noise_var};
    const ChannelState state =
        sample_channel(params, Seed{12, static_cast<std::uint64_t>(rep)});
    const ComplexMatrix y = oracles::random_matrix(2, 3, rng);
    const EqualizedLatent est = mmse_equalize(y, state, params);

    // W = P Zcov H^H (P H H^H + sigma^2 I)^-1 with Zcov = I, via a hand 2x2 inverse.
    ComplexMatrix m = scale(matmul(state.h, hermitian(state.h)), power);
    m(0, 0) += noise_var;
    m(1, 1) += noise_var;
    const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    ComplexMatrix minv(2, 2);
    minv(0, 0) = m(1, 1) / det;
    minv(1, 1) = m(0, 0) / det;
    minv(0, 1) = -m(0, 1) / det;
    minv(1, 0) = -m(1, 0) / det;
    const ComplexMatrix w = scale(matmul(hermitian(state.h), minv), power);
    const ComplexMatrix want = matmul(w, y);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t s = 0; s < 2; ++s)
        CHECK(rel_err(est.symbols[c * 2 + s], want(s, c)) < 1e-9);
  }
}

TEST_CASE("mmse error variance prediction matches empirical MSE") {
  const ChannelParams params{2, 2, 1.0, 0.5};
  const ChannelState state = sample_channel(params, Seed{13, 0});
  const long k = 100000;
  Rng rng(Seed{13, 1});
  const ComplexMatrix z = oracles::normalized_frame(2, static_cast<std::size_t>(k), rng);
  const ComplexMatrix y = transmit(z, state, params, Seed{13, 2});
  const EqualizedLatent est = mmse_equalize(y, state, params);
  double emp[2] = {0.0, 0.0};
  for (long c = 0; c < k; ++c)
    for (std::size_t s = 0; s < 2; ++s)
      emp[s] += std::norm(est.symbols[static_cast<std::size_t>(c) * 2 + s] -
                          z(s, static_cast<std::size_t>(c)));
  for (std::size_t s = 0; s < 2; ++s) {
    emp[s] /= static_cast<double>(k);
    CHECK(std::abs(emp[s] - est.per_symbol_err_var[s]) / est.per_symbol_err_var[s] <= 0.03);
  }
}

TEST_CASE("mmse filter beats randomly perturbed filters") {
  const ChannelParams params{2, 2, 1.0, 0.5};
  const ChannelState state = sample_channel(params, Seed{14, 0});
  const long k = 100000;
  Rng rng(Seed{14, 1});
  const ComplexMatrix z = oracles::normalized_frame(2, static_cast<std::size_t>(k), rng);
  const ComplexMatrix y = transmit(z, state, params, Seed{14, 2});
  const EqualizedLatent est = mmse_equalize(y, state, params);
  double mmse_err = 0.0;
  for (long c = 0; c < k; ++c)
    for (std::size_t s = 0; s < 2; ++s)
      mmse_err += std::norm(est.symbols[static_cast<std::size_t>(c) * 2 + s] -
                            z(s, static_cast<std::size_t>(c)));

  // Recover the implied filter application via perturbed direct filters.
  ComplexMatrix m = matmul(state.h, hermitian(state.h));
  m(0, 0) += params.noise_var / params.power;
  m(1, 1) += params.noise_var / params.power;
  const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  ComplexMatrix minv(2, 2);
  minv(0, 0) = m(1, 1) / det;
  minv(1, 1) = m(0, 0) / det;
  minv(0, 1) = -m(0, 1) / det;
  minv(1, 0) = -m(1, 0) / det;
  const ComplexMatrix w = matmul(hermitian(state.h), minv);
  for (int pert = 0; pert < 20; ++pert) {
    ComplexMatrix wp = w;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j) wp(i, j) += 1e-2 * rng.complex_normal();
    const ComplexMatrix zp = matmul(wp, y);
    double err = 0.0;
    for (std::size_t c = 0; c < zp.cols(); ++c)
      for (std::size_t s = 0; s < 2; ++s) err += std::norm(zp(s, c) - z(s, c));
    CHECK(mmse_err <= err);
  }
}

TEST_CASE("post_equalize hooks") {
  const ChannelParams params{2, 2, 1.0, 0.5};
  const ChannelState state = sample_channel(params, Seed{15, 0});
  Rng rng(Seed{15, 1});
  const ComplexMatrix y = oracles::random_matrix(2, 3, rng);
  const EqualizedLatent base = mmse_equalize(y, state, params);

  SUBCASE("default zero hook is the identity") {
    const EqualizedLatent out = post_equalize(zero_post_equalizer(), base, y, state);
    CHECK(out.symbols == base.symbols);
  }

  SUBCASE("constant offset hook shifts every symbol") {
    const Complex c{0.25, -0.5};
    const PostEqualizer hook = [c](std::span<const Complex>, const ComplexMatrix& h) {
      return std::vector<Complex>(h.cols(), c);
    };
    const EqualizedLatent out = post_equalize(hook, base, y, state);
    for (std::size_t i = 0; i < out.symbols.size(); ++i)
      CHECK(std::abs(out.symbols[i] - (base.symbols[i] + c)) < 1e-15);
  }

  SUBCASE("affine hook composes exactly") {
    const Complex a{0.3, 0.7};
    const PostEqualizer hook = [a](std::span<const Complex> col, const ComplexMatrix& h) {
      std::vector<Complex> out(h.cols());
      for (std::size_t s = 0; s < out.size(); ++s) out[s] = a * col[s % col.size()];
      return out;
    };
    const EqualizedLatent out = post_equalize(hook, base, y, state);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t s = 0; s < 2; ++s) {
        const Complex want = base.symbols[c * 2 + s] + a * y(s % 2, c);
        CHECK(std::abs(out.symbols[c * 2 + s] - want) < 1e-12);
      }
    }
  }

  SUBCASE("registry round trip") {
    register_post_equalizer("affine-test", [] {
      return PostEqualizer([](std::span<const Complex>, const ComplexMatrix& h) {
        return std::vector<Complex>(h.cols(), Complex{1.0, 0.0});
      });
    });
    const PostEqualizer hook = make_post_equalizer("affine-test");
    const EqualizedLatent out = post_equalize(hook, base, y, state);
    CHECK(std::abs(out.symbols[0] - (base.symbols[0] + Complex{1.0, 0.0})) < 1e-15);
    CHECK_THROWS_AS(make_post_equalizer("nope"), ConfigError);
    CHECK_NOTHROW(make_post_equalizer("zero"));
  }
}
