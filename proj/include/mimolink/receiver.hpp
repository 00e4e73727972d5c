#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mimolink/channel.hpp"
#include "mimolink/complex_matrix.hpp"
#include "mimolink/stm.hpp"

namespace mimolink {

// Real-valued equivalent channel of an orthogonal design: the real-stacked
// received block equals sqrt(P) * a * x_real + noise with a^T a = gain * I.
// gain == gain_per_unit_channel * ||H||_F^2.
struct EquivalentChannel {
  RealMatrix a;                  // (2 N nr) x (2 K)
  double gain = 0.0;             // g
  double gain_per_unit_channel;  // N/K for the orthogonal designs
};

// Receiver-side symbol estimates with the per-symbol shrinkage already
// applied. err_var entries are the residual MSE for a unit-variance symbol.
struct EqualizedLatent {
  std::vector<Complex> symbols;
  std::vector<double> per_symbol_gain;
  std::vector<double> per_symbol_err_var;
};

// Alamouti decoupling of one block: y1, y2 are the nr x 1 received columns
// of the two slots. Returns the matched statistics (m1, m2); in the
// noiseless case m_i == P * g * z_i with g = ||h_A||^2 + ||h_B||^2.
std::pair<Complex, Complex> alamouti_decouple(const ComplexMatrix& y1,
                                              const ComplexMatrix& y2,
                                              const ChannelState& state,
                                              double power);

// Scalar MMSE shrinkage of a decoupled statistic: m / (P g + sigma^2).
Complex ostbc_scalar_mmse(Complex m, double gain, double power, double noise_var);

EquivalentChannel equivalent_channel(const StmScheme& scheme, const ChannelState& state);

// Same construction with an injectable block encoder; test seam for
// encoder mutations. An empty function selects the real encoder.
using BlockEncoderFn =
    std::function<ComplexMatrix(const StmScheme&, std::span<const Complex>)>;
EquivalentChannel build_equivalent_channel(const StmScheme& scheme,
                                           const ChannelState& state,
                                           const BlockEncoderFn& block_encoder);

// Full OSTBC receive path: per block, matched filter on the real-stacked
// receive vector, then per-symbol MMSE shrinkage. If latent_len > 0, the
// zero-pad tail is stripped to that many symbols.
EqualizedLatent ostbc_decode(const StmScheme& scheme, const ComplexMatrix& y,
                             const ChannelState& state, const ChannelParams& params,
                             std::size_t latent_len = 0);

// Linear MMSE equalizer for the multiplexing path, applied column-wise with
// a single filter per frame: Z[i] = H^H (H H^H + sigma^2/P I)^-1 Y[i].
// Symbols are the column-major vectorization of Z (the inverse of the
// multiplexing reshape).
EqualizedLatent mmse_equalize(const ComplexMatrix& y, const ChannelState& state,
                              const ChannelParams& params);

// Per-column correction hook standing in for a learned residual stage:
// takes one received column and H, returns an nt-length correction.
using PostEqualizer =
    std::function<std::vector<Complex>(std::span<const Complex> y_col,
                                       const ComplexMatrix& h)>;

// Z_hat[i] = Z_mmse[i] + hook(Y[i], H). The default zero hook returns the
// input unchanged.
EqualizedLatent post_equalize(const PostEqualizer& hook, const EqualizedLatent& z_mmse,
                              const ComplexMatrix& y, const ChannelState& state);

PostEqualizer zero_post_equalizer();
void register_post_equalizer(const std::string& name,
                             std::function<PostEqualizer()> factory);
PostEqualizer make_post_equalizer(const std::string& name);

}  // namespace mimolink
