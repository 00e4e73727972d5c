#include "mimolink/receiver.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "mimolink/errors.hpp"

namespace mimolink {

namespace {

// Column-major vectorization of a complex matrix followed by the [Re; Im]
// real stacking. Must stay consistent between the equivalent channel
// columns and the received block.
std::vector<double> real_stack_vec(const ComplexMatrix& m) {
  const std::size_t n = m.rows() * m.cols();
  std::vector<double> v(2 * n);
  std::size_t idx = 0;
  for (std::size_t c = 0; c < m.cols(); ++c) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const Complex z = m(r, c);
      v[idx] = z.real();
      v[idx + n] = z.imag();
      ++idx;
    }
  }
  return v;
}

Complex inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  // a^H b for nr x 1 columns.
  Complex s{0.0, 0.0};
  for (std::size_t i = 0; i < a.rows(); ++i) s += std::conj(a(i, 0)) * b(i, 0);
  return s;
}

std::mutex g_hook_mutex;
std::map<std::string, std::function<PostEqualizer()>>& hook_registry() {
  static std::map<std::string, std::function<PostEqualizer()>> reg = {
      {"zero", [] { return zero_post_equalizer(); }},
  };
  return reg;
}

}  // namespace

std::pair<Complex, Complex> alamouti_decouple(const ComplexMatrix& y1,
                                              const ComplexMatrix& y2,
                                              const ChannelState& state,
                                              double power) {
  const ComplexMatrix& h = state.h;
  if (h.cols() != 2) {
    throw ConfigError("alamouti_decouple needs N_t = 2, channel has " +
                      std::to_string(h.cols()) + " columns");
  }
  if (y1.rows() != h.rows() || y2.rows() != h.rows() || y1.cols() != 1 || y2.cols() != 1) {
    throw DimensionError("alamouti_decouple expects nr x 1 slot columns");
  }
  ComplexMatrix ha(h.rows(), 1), hb(h.rows(), 1);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    ha(i, 0) = h(i, 0);
    hb(i, 0) = h(i, 1);
  }
  const double sp = std::sqrt(power);
  // m1 = sqrt(P) h_A^H y1 + sqrt(P) y2^H h_B
  // m2 = sqrt(P) h_B^H y1 - sqrt(P) y2^H h_A
  const Complex m1 = sp * inner(ha, y1) + sp * inner(y2, hb);
  const Complex m2 = sp * inner(hb, y1) - sp * inner(y2, ha);
  return {m1, m2};
}

Complex ostbc_scalar_mmse(Complex m, double gain, double power, double noise_var) {
  const double denom = power * gain + noise_var;
  if (denom <= 0.0) return {0.0, 0.0};  // no observation: prior mean
  return m / denom;
}

EquivalentChannel build_equivalent_channel(const StmScheme& scheme,
                                           const ChannelState& state,
                                           const BlockEncoderFn& block_encoder) {
  scheme.validate();
  if (!scheme.is_ostbc()) {
    throw ConfigError("multiplexing has no orthogonal block structure; "
                      "use mmse_equalize instead");
  }
  if (state.h.cols() != static_cast<std::size_t>(scheme.nt)) {
    throw DimensionError("channel has " + std::to_string(state.h.cols()) +
                         " transmit antennas, scheme " + scheme.name() + " needs " +
                         std::to_string(scheme.nt));
  }
  const auto encoder = block_encoder
                           ? block_encoder
                           : [](const StmScheme& s, std::span<const Complex> x) {
                               return encode_block(s, x);
                             };

  const std::size_t bk = static_cast<std::size_t>(scheme.symbols_per_block());
  const std::size_t bn = static_cast<std::size_t>(scheme.slots_per_block());
  const std::size_t nr = state.h.rows();
  const double amp = frame_power_scale(scheme.kind);

  RealMatrix a(2 * bn * nr, 2 * bk);
  std::vector<Complex> basis(bk, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < 2 * bk; ++j) {
    const std::size_t sym = j % bk;
    basis[sym] = (j < bk) ? Complex{1.0, 0.0} : Complex{0.0, 1.0};
    const ComplexMatrix rx = scale(matmul(state.h, encoder(scheme, basis)), amp);
    const std::vector<double> col = real_stack_vec(rx);
    for (std::size_t i = 0; i < col.size(); ++i) a(i, j) = col[i];
    basis[sym] = Complex{0.0, 0.0};
  }
  const double per_unit = ostbc_gain_per_unit_channel(scheme.kind);
  return EquivalentChannel{std::move(a), per_unit * frobenius_norm_sq(state.h), per_unit};
}

EquivalentChannel equivalent_channel(const StmScheme& scheme, const ChannelState& state) {
  return build_equivalent_channel(scheme, state, BlockEncoderFn{});
}

EqualizedLatent ostbc_decode(const StmScheme& scheme, const ComplexMatrix& y,
                             const ChannelState& state, const ChannelParams& params,
                             std::size_t latent_len) {
  scheme.validate();
  const std::size_t bn = static_cast<std::size_t>(scheme.slots_per_block());
  const std::size_t bk = static_cast<std::size_t>(scheme.symbols_per_block());
  const std::size_t nr = state.h.rows();
  if (y.rows() != nr || y.cols() % bn != 0) {
    throw DimensionError("ostbc_decode: received frame " + std::to_string(y.rows()) +
                         "x" + std::to_string(y.cols()) + " does not match nr=" +
                         std::to_string(nr) + ", block length " + std::to_string(bn));
  }
  const std::size_t num_blocks = y.cols() / bn;
  const std::size_t total = num_blocks * bk;
  if (latent_len == 0) latent_len = total;
  if (latent_len > total) {
    throw DimensionError("latent length " + std::to_string(latent_len) +
                         " exceeds frame capacity " + std::to_string(total));
  }

  const EquivalentChannel eq = equivalent_channel(scheme, state);
  const RealMatrix at = transpose(eq.a);
  const double p = params.power;
  const double denom = p * eq.gain + params.noise_var;
  const double sym_gain = denom > 0.0 ? p * eq.gain / denom : 0.0;
  const double err_var = denom > 0.0 ? params.noise_var / denom : 1.0;
  const double coeff = denom > 0.0 ? std::sqrt(p) / denom : 0.0;

  EqualizedLatent out;
  out.symbols.resize(latent_len);
  out.per_symbol_gain.assign(latent_len, sym_gain);
  out.per_symbol_err_var.assign(latent_len, err_var);

  ComplexMatrix block(nr, bn);
  for (std::size_t blk = 0; blk < num_blocks; ++blk) {
    if (blk * bk >= latent_len) break;  // pure-padding tail blocks
    for (std::size_t c = 0; c < bn; ++c)
      for (std::size_t r = 0; r < nr; ++r) block(r, c) = y(r, blk * bn + c);
    const std::vector<double> m = matvec(at, real_stack_vec(block));
    for (std::size_t s = 0; s < bk; ++s) {
      const std::size_t idx = blk * bk + s;
      if (idx >= latent_len) break;
      out.symbols[idx] = Complex{coeff * m[s], coeff * m[s + bk]};
    }
  }
  return out;
}

EqualizedLatent mmse_equalize(const ComplexMatrix& y, const ChannelState& state,
                              const ChannelParams& params) {
  const ComplexMatrix& h = state.h;
  if (y.rows() != h.rows()) {
    throw DimensionError("mmse_equalize: received frame has " + std::to_string(y.rows()) +
                         " rows, channel has " + std::to_string(h.rows()));
  }
  const std::size_t nt = h.cols();
  const std::size_t k = y.cols();
  const double p = params.power;
  const double sigma2 = params.noise_var;

  // Filter computed once per frame: Z = H^H (H H^H + sigma^2/P I)^-1 Y.
  ComplexMatrix m = matmul(h, hermitian(h));
  for (std::size_t i = 0; i < m.rows(); ++i) m(i, i) += sigma2 / p;
  const ComplexMatrix z = matmul(hermitian(h), solve_hpd(m, y));

  // Per-stream error variance: diag of (I + (P/sigma^2) H^H H)^-1.
  std::vector<double> stream_err(nt, 0.0);
  if (sigma2 > 0.0) {
    ComplexMatrix e = scale(matmul(hermitian(h), h), p / sigma2);
    for (std::size_t i = 0; i < e.rows(); ++i) e(i, i) += 1.0;
    const ComplexMatrix inv = solve_hpd(e, ComplexMatrix::identity(nt));
    for (std::size_t i = 0; i < nt; ++i) stream_err[i] = inv(i, i).real();
  }

  EqualizedLatent out;
  out.symbols.resize(nt * k);
  out.per_symbol_gain.resize(nt * k);
  out.per_symbol_err_var.resize(nt * k);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t s = 0; s < nt; ++s) {
      const std::size_t idx = c * nt + s;
      out.symbols[idx] = z(s, c);
      out.per_symbol_err_var[idx] = stream_err[s];
      out.per_symbol_gain[idx] = 1.0 - stream_err[s];
    }
  }
  return out;
}

EqualizedLatent post_equalize(const PostEqualizer& hook, const EqualizedLatent& z_mmse,
                              const ComplexMatrix& y, const ChannelState& state) {
  if (!hook) throw ConfigError("post_equalize requires a registered hook");
  const std::size_t nt = state.h.cols();
  if (z_mmse.symbols.size() % nt != 0 || z_mmse.symbols.size() / nt != y.cols()) {
    throw DimensionError("post_equalize: latent length " +
                         std::to_string(z_mmse.symbols.size()) +
                         " does not match nt=" + std::to_string(nt) + " over " +
                         std::to_string(y.cols()) + " columns");
  }
  EqualizedLatent out = z_mmse;
  std::vector<Complex> col(y.rows());
  for (std::size_t c = 0; c < y.cols(); ++c) {
    for (std::size_t r = 0; r < y.rows(); ++r) col[r] = y(r, c);
    const std::vector<Complex> corr = hook(col, state.h);
    if (corr.size() != nt) {
      throw DimensionError("post-equalizer hook returned " + std::to_string(corr.size()) +
                           " values, expected " + std::to_string(nt));
    }
    for (std::size_t s = 0; s < nt; ++s) out.symbols[c * nt + s] += corr[s];
  }
  return out;
}

PostEqualizer zero_post_equalizer() {
  return [](std::span<const Complex>, const ComplexMatrix& h) {
    return std::vector<Complex>(h.cols(), Complex{0.0, 0.0});
  };
}

void register_post_equalizer(const std::string& name,
                             std::function<PostEqualizer()> factory) {
  std::lock_guard<std::mutex> lock(g_hook_mutex);
  hook_registry()[name] = std::move(factory);
}

PostEqualizer make_post_equalizer(const std::string& name) {
  std::lock_guard<std::mutex> lock(g_hook_mutex);
  const auto it = hook_registry().find(name);
  if (it == hook_registry().end()) {
    throw ConfigError("no post-equalizer registered under '" + name + "'");
  }
  return it->second();
}

}  // namespace mimolink
