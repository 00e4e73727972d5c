#pragma once

#include <span>
#include <string>
#include <vector>

#include "mimolink/complex_matrix.hpp"

namespace mimolink {

// Exact rational, used for the bandwidth ratio (channel uses per pixel).
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational parse(const std::string& text);  // "5/24", "3", "0.125"
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  void normalize();

  friend bool operator==(const Rational&, const Rational&) = default;
};

struct ImageDims {
  int channels = 0;
  int height = 0;
  int width = 0;
  long pixels() const { return static_cast<long>(channels) * height * width; }
  void validate() const;
};

enum class SchemeKind { Multiplexing, Alamouti, Ostbc3Rate12, Ostbc3Rate34 };

// A space-time mapping: K latent symbols per block, N channel uses per
// block, symbol rate K/N. Multiplexing is the identity reshape (K = nt,
// N = 1); the other three are orthogonal designs.
struct StmScheme {
  SchemeKind kind = SchemeKind::Multiplexing;
  int nt = 1;

  int symbols_per_block() const;   // K
  int slots_per_block() const;     // N
  double code_rate() const { return static_cast<double>(symbols_per_block()) / slots_per_block(); }
  bool is_ostbc() const { return kind != SchemeKind::Multiplexing; }
  std::string name() const;        // "mux", "alamouti", "ostbc3-r12", "ostbc3-r34"
  void validate() const;           // antenna compatibility

  static StmScheme multiplexing(int nt);
  static StmScheme alamouti();
  static StmScheme ostbc3_rate12();
  static StmScheme ostbc3_rate34();
  static StmScheme from_name(const std::string& name, int nt);
};

// Latent vector z with ||z||^2 == size() enforced by normalize_latent.
// norm_scale is the factor that was applied to reach that power; the source
// decoder divides it back out.
struct LatentVector {
  std::vector<Complex> symbols;
  double norm_scale = 1.0;
  std::size_t size() const { return symbols.size(); }
};

LatentVector normalize_latent(std::vector<Complex> raw);

// One encoded transmit frame plus the metadata the receive side needs:
// how many of the padded symbols are real payload and the power rescale
// that was applied.
struct EncodedFrame {
  ComplexMatrix s;          // nt x (N * num_blocks)
  std::size_t latent_len;   // payload symbols before padding
  std::size_t padded_len;   // K * num_blocks
  double power_scale;       // constant frame rescale for this scheme
};

// Raw per-block transmit matrix (nt x N) for K symbols, without the frame
// power rescale. For the OSTBC kinds it satisfies B B^H = c * sum|x_i|^2 * I
// with c = design gain constant.
ComplexMatrix encode_block(const StmScheme& scheme, std::span<const Complex> symbols);

// Full-frame encoder. Pads z with zeros up to a whole number of blocks (and
// up to `target_channel_uses` slots when given), then applies the per-scheme
// power rescale so a frame with ||z||^2 = l fills the nt*k budget exactly.
EncodedFrame encode(const StmScheme& scheme, const LatentVector& z,
                    long target_channel_uses = 0);

long channel_uses(const Rational& rho, const ImageDims& dims);
long channel_uses(const Rational& rho, long pixels);
long latent_length(const StmScheme& scheme, long k);

// Frame amplitude rescale sqrt(N / (c K)); 1 for every scheme except the
// rate-3/4 design, which under-fills the frame budget without it.
double frame_power_scale(SchemeKind kind);

// Design constant c in B B^H = c ||x||^2 I.
double ostbc_design_gain(SchemeKind kind);

// c * scale^2 = N / K: equivalent-channel gain per unit ||H||_F^2.
double ostbc_gain_per_unit_channel(SchemeKind kind);

}  // namespace mimolink
