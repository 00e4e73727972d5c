#include "mimolink/stm.hpp"

#include <cmath>
#include <numeric>

#include "mimolink/errors.hpp"

namespace mimolink {

namespace {

const double kSqrt2 = std::sqrt(2.0);

long long parse_ll(const std::string& s) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid integer '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("invalid integer '" + s + "'");
  return v;
}

}  // namespace

void Rational::normalize() {
  if (den == 0) throw ConfigError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
}

Rational Rational::parse(const std::string& text) {
  Rational r;
  const auto slash = text.find('/');
  const auto dot = text.find('.');
  if (slash != std::string::npos) {
    r.num = parse_ll(text.substr(0, slash));
    r.den = parse_ll(text.substr(slash + 1));
  } else if (dot != std::string::npos) {
    // Decimal: digits after the dot become a power-of-ten denominator.
    const std::string head = text.substr(0, dot);
    const std::string tail = text.substr(dot + 1);
    if (tail.empty() || tail.size() > 12) throw ConfigError("invalid rational '" + text + "'");
    long long den = 1;
    for (std::size_t i = 0; i < tail.size(); ++i) den *= 10;
    const long long whole = head.empty() || head == "-" ? 0 : parse_ll(head);
    const long long frac = parse_ll(tail);
    const bool neg = !head.empty() && head[0] == '-';
    r.num = whole * den + (neg ? -frac : frac);
    r.den = den;
  } else {
    r.num = parse_ll(text);
    r.den = 1;
  }
  r.normalize();
  return r;
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

void ImageDims::validate() const {
  if (channels < 1 || height < 1 || width < 1) {
    throw ConfigError("image dims must be positive, got " + std::to_string(channels) +
                      "x" + std::to_string(height) + "x" + std::to_string(width));
  }
}

int StmScheme::symbols_per_block() const {
  switch (kind) {
    case SchemeKind::Multiplexing: return nt;
    case SchemeKind::Alamouti: return 2;
    case SchemeKind::Ostbc3Rate12: return 4;
    case SchemeKind::Ostbc3Rate34: return 3;
  }
  return 0;
}

int StmScheme::slots_per_block() const {
  switch (kind) {
    case SchemeKind::Multiplexing: return 1;
    case SchemeKind::Alamouti: return 2;
    case SchemeKind::Ostbc3Rate12: return 8;
    case SchemeKind::Ostbc3Rate34: return 4;
  }
  return 0;
}

std::string StmScheme::name() const {
  switch (kind) {
    case SchemeKind::Multiplexing: return "mux";
    case SchemeKind::Alamouti: return "alamouti";
    case SchemeKind::Ostbc3Rate12: return "ostbc3-r12";
    case SchemeKind::Ostbc3Rate34: return "ostbc3-r34";
  }
  return "?";
}

void StmScheme::validate() const {
  switch (kind) {
    case SchemeKind::Multiplexing:
      if (nt < 1) throw ConfigError("mux needs nt >= 1, got " + std::to_string(nt));
      break;
    case SchemeKind::Alamouti:
      if (nt != 2) throw ConfigError("alamouti needs nt = 2, got " + std::to_string(nt));
      break;
    case SchemeKind::Ostbc3Rate12:
    case SchemeKind::Ostbc3Rate34:
      if (nt != 3) throw ConfigError(name() + " needs nt = 3, got " + std::to_string(nt));
      break;
  }
}

StmScheme StmScheme::multiplexing(int nt) {
  StmScheme s{SchemeKind::Multiplexing, nt};
  s.validate();
  return s;
}
StmScheme StmScheme::alamouti() { return StmScheme{SchemeKind::Alamouti, 2}; }
StmScheme StmScheme::ostbc3_rate12() { return StmScheme{SchemeKind::Ostbc3Rate12, 3}; }
StmScheme StmScheme::ostbc3_rate34() { return StmScheme{SchemeKind::Ostbc3Rate34, 3}; }

StmScheme StmScheme::from_name(const std::string& name, int nt) {
  StmScheme s;
  if (name == "mux") {
    s = StmScheme{SchemeKind::Multiplexing, nt};
  } else if (name == "alamouti") {
    s = StmScheme{SchemeKind::Alamouti, nt};
  } else if (name == "ostbc3-r12") {
    s = StmScheme{SchemeKind::Ostbc3Rate12, nt};
  } else if (name == "ostbc3-r34") {
    s = StmScheme{SchemeKind::Ostbc3Rate34, nt};
  } else {
    throw ConfigError("unknown scheme '" + name +
                      "' (expected mux, alamouti, ostbc3-r12 or ostbc3-r34)");
  }
  s.validate();
  return s;
}

LatentVector normalize_latent(std::vector<Complex> raw) {
  if (raw.empty()) throw DegenerateInputError("empty latent vector");
  double power = 0.0;
  for (const Complex& z : raw) power += std::norm(z);
  if (!(power > 0.0)) throw DegenerateInputError("all-zero latent vector");
  const double target = static_cast<double>(raw.size());
  const double alpha = std::sqrt(target / power);
  for (Complex& z : raw) z *= alpha;
  return LatentVector{std::move(raw), alpha};
}

double frame_power_scale(SchemeKind kind) {
  // sqrt(N / (c K)): makes a frame with ||z||^2 = l meet ||S||_F^2 = nt*k.
  switch (kind) {
    case SchemeKind::Multiplexing: return 1.0;
    case SchemeKind::Alamouti: return 1.0;       // N/(cK) = 2/(1*2)
    case SchemeKind::Ostbc3Rate12: return 1.0;   // N/(cK) = 8/(2*4)
    case SchemeKind::Ostbc3Rate34: return std::sqrt(4.0 / 3.0);
  }
  return 1.0;
}

double ostbc_design_gain(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::Multiplexing: return 0.0;
    case SchemeKind::Alamouti: return 1.0;
    case SchemeKind::Ostbc3Rate12: return 2.0;
    case SchemeKind::Ostbc3Rate34: return 1.0;
  }
  return 0.0;
}

double ostbc_gain_per_unit_channel(SchemeKind kind) {
  const double s = frame_power_scale(kind);
  return ostbc_design_gain(kind) * s * s;
}

ComplexMatrix encode_block(const StmScheme& scheme, std::span<const Complex> x) {
  scheme.validate();
  const std::size_t k = static_cast<std::size_t>(scheme.symbols_per_block());
  if (x.size() != k) {
    throw DimensionError("encode_block for " + scheme.name() + " needs " +
                         std::to_string(k) + " symbols, got " + std::to_string(x.size()));
  }
  const std::size_t n = static_cast<std::size_t>(scheme.slots_per_block());
  ComplexMatrix b(static_cast<std::size_t>(scheme.nt), n);
  switch (scheme.kind) {
    case SchemeKind::Multiplexing:
      for (std::size_t a = 0; a < k; ++a) b(a, 0) = x[a];
      break;
    case SchemeKind::Alamouti:
      // Slot 1: (z1, z2); slot 2: (-z2*, z1*).
      b(0, 0) = x[0];
      b(1, 0) = x[1];
      b(0, 1) = -std::conj(x[1]);
      b(1, 1) = std::conj(x[0]);
      break;
    case SchemeKind::Ostbc3Rate12: {
      // Rate-1/2 generalized complex orthogonal design for three antennas:
      // four slot-columns followed by their conjugates.
      const Complex x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3];
      const Complex cols[4][3] = {
          {x1, x2, x3},
          {-x2, x1, -x4},
          {-x3, x4, x1},
          {-x4, -x3, x2},
      };
      for (std::size_t t = 0; t < 4; ++t) {
        for (std::size_t a = 0; a < 3; ++a) {
          b(a, t) = cols[t][a];
          b(a, t + 4) = std::conj(cols[t][a]);
        }
      }
      break;
    }
    case SchemeKind::Ostbc3Rate34: {
      const Complex x1 = x[0], x2 = x[1], x3 = x[2];
      const Complex x1c = std::conj(x1), x2c = std::conj(x2), x3c = std::conj(x3);
      b(0, 0) = x1;
      b(1, 0) = x2;
      b(2, 0) = x3 / kSqrt2;
      b(0, 1) = -x2c;
      b(1, 1) = x1c;
      b(2, 1) = x3 / kSqrt2;
      b(0, 2) = x3c / kSqrt2;
      b(1, 2) = x3c / kSqrt2;
      b(2, 2) = (-x1 - x1c + x2 - x2c) / 2.0;
      b(0, 3) = x3c / kSqrt2;
      b(1, 3) = -x3c / kSqrt2;
      b(2, 3) = (x2 + x2c + x1 - x1c) / 2.0;
      break;
    }
  }
  return b;
}

EncodedFrame encode(const StmScheme& scheme, const LatentVector& z,
                    long target_channel_uses) {
  scheme.validate();
  if (z.symbols.empty()) throw DegenerateInputError("empty latent vector");
  const std::size_t bk = static_cast<std::size_t>(scheme.symbols_per_block());
  const std::size_t bn = static_cast<std::size_t>(scheme.slots_per_block());

  std::size_t num_blocks = (z.size() + bk - 1) / bk;
  if (target_channel_uses > 0) {
    const std::size_t target = static_cast<std::size_t>(target_channel_uses);
    if (target % bn != 0) {
      throw ConfigError("channel uses " + std::to_string(target) +
                        " not divisible by block length " + std::to_string(bn) +
                        " for scheme " + scheme.name());
    }
    if (target / bn < num_blocks) {
      throw ConfigError("latent of length " + std::to_string(z.size()) +
                        " does not fit in " + std::to_string(target) + " channel uses");
    }
    num_blocks = target / bn;
  }
  const std::size_t padded = num_blocks * bk;

  std::vector<Complex> sym = z.symbols;
  sym.resize(padded, Complex{0.0, 0.0});  // tail zero padding

  const double scale = frame_power_scale(scheme.kind);
  ComplexMatrix s(static_cast<std::size_t>(scheme.nt), num_blocks * bn);
  for (std::size_t blk = 0; blk < num_blocks; ++blk) {
    const ComplexMatrix b =
        encode_block(scheme, std::span<const Complex>(sym.data() + blk * bk, bk));
    for (std::size_t a = 0; a < b.rows(); ++a)
      for (std::size_t t = 0; t < bn; ++t) s(a, blk * bn + t) = scale * b(a, t);
  }
  return EncodedFrame{std::move(s), z.size(), padded, scale};
}

long channel_uses(const Rational& rho, long pixels) {
  if (rho.num <= 0 || rho.den <= 0) {
    throw ConfigError("bandwidth ratio must be positive, got " + rho.str());
  }
  if (pixels < 1) throw ConfigError("pixel count must be positive");
  const long long total = rho.num * static_cast<long long>(pixels);
  if (total % rho.den != 0) {
    throw ConfigError("rho * pixels = " + rho.str() + " * " + std::to_string(pixels) +
                      " is not an integer (" + std::to_string(total) + "/" +
                      std::to_string(rho.den) + ")");
  }
  return static_cast<long>(total / rho.den);
}

long channel_uses(const Rational& rho, const ImageDims& dims) {
  dims.validate();
  return channel_uses(rho, dims.pixels());
}

long latent_length(const StmScheme& scheme, long k) {
  scheme.validate();
  if (k < 1) throw ConfigError("channel uses must be positive, got " + std::to_string(k));
  const int bn = scheme.slots_per_block();
  if (k % bn != 0) {
    throw ConfigError("channel uses " + std::to_string(k) + " must be divisible by " +
                      std::to_string(bn) + " for scheme " + scheme.name());
  }
  return (k / bn) * scheme.symbols_per_block();
}

}  // namespace mimolink
