#pragma once

// Test-side oracles. Each is written independently of the library path it
// cross-checks (different algorithm or explicit index arithmetic).

#include <cmath>
#include <complex>
#include <vector>

#include "mimolink/complex_matrix.hpp"
#include "mimolink/rng.hpp"

namespace oracles {

using mimolink::Complex;
using mimolink::ComplexMatrix;

// Naive i-j-k triple loop, scalar accumulation order.
inline ComplexMatrix naive_matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Complex s{0.0, 0.0};
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

// Eigenvalues of a 3x3 Hermitian matrix by the trigonometric solution of
// the characteristic cubic.
inline std::vector<double> hermitian3_eigenvalues(const ComplexMatrix& a) {
  const double p1 = std::norm(a(0, 1)) + std::norm(a(0, 2)) + std::norm(a(1, 2));
  const double q = (a(0, 0).real() + a(1, 1).real() + a(2, 2).real()) / 3.0;
  const double d0 = a(0, 0).real() - q;
  const double d1 = a(1, 1).real() - q;
  const double d2 = a(2, 2).real() - q;
  const double p2 = d0 * d0 + d1 * d1 + d2 * d2 + 2.0 * p1;
  if (p2 <= 0.0) return {q, q, q};
  const double p = std::sqrt(p2 / 6.0);

  // det((A - q I) / p), real for Hermitian input.
  auto e = [&](std::size_t i, std::size_t j) -> Complex {
    Complex v = a(i, j);
    if (i == j) v -= q;
    return v / p;
  };
  const Complex det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) -
                      e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0)) +
                      e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
  double r = det.real() / 2.0;
  r = std::max(-1.0, std::min(1.0, r));
  const double phi = std::acos(r) / 3.0;
  const double pi = 3.14159265358979323846;
  const double l1 = q + 2.0 * p * std::cos(phi);
  const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * pi / 3.0);
  return {l1, 3.0 * q - l1 - l3, l3};
}

// Eigenvalues of a 2x2 Hermitian matrix (closed form).
inline std::vector<double> hermitian2_eigenvalues(const ComplexMatrix& a) {
  const double tr = a(0, 0).real() + a(1, 1).real();
  const double det = a(0, 0).real() * a(1, 1).real() - std::norm(a(0, 1));
  const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
  return {(tr + disc) / 2.0, (tr - disc) / 2.0};
}

// Random test matrix with standard complex Gaussian entries.
inline ComplexMatrix random_matrix(std::size_t rows, std::size_t cols, mimolink::Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

// Random HPD matrix G G^H + I.
inline ComplexMatrix random_hpd(std::size_t n, mimolink::Rng& rng) {
  const ComplexMatrix g = random_matrix(n, n, rng);
  ComplexMatrix a = mimolink::matmul(g, mimolink::hermitian(g));
  for (std::size_t i = 0; i < n; ++i) a(i, i) += 1.0;
  return a;
}

// Random transmit frame scaled under the nt*k power budget.
inline ComplexMatrix random_frame(std::size_t nt, std::size_t k, mimolink::Rng& rng) {
  ComplexMatrix s = random_matrix(nt, k, rng);
  const double budget = 0.95 * static_cast<double>(nt) * static_cast<double>(k);
  const double power = mimolink::frobenius_norm_sq(s);
  return mimolink::scale(s, std::sqrt(budget / power));
}

// Random unit-variance symbol frame normalized to meet the power budget
// exactly, like the transmit pipeline does.
inline ComplexMatrix normalized_frame(std::size_t nt, std::size_t k, mimolink::Rng& rng) {
  ComplexMatrix s = random_matrix(nt, k, rng);
  const double budget = static_cast<double>(nt) * static_cast<double>(k);
  return mimolink::scale(s, std::sqrt(budget / mimolink::frobenius_norm_sq(s)));
}

// CDF of Gamma(2, 1) = chi-square(4)/2: P(|h1|^2 + |h2|^2 < u).
inline double gamma2_cdf(double u) { return 1.0 - std::exp(-u) * (1.0 + u); }

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

inline double rel_err(Complex got, Complex want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace oracles
