#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mimolink/errors.hpp"

namespace mimolink {

using Complex = std::complex<double>;

// Dense row-major complex matrix. Operations return new values; nothing is
// mutated in place, so instances can be shared across worker threads.
// Everything here is sized for link-level frames (N_t <= 3, N_r <= 4), not
// for general-purpose linear algebra.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  Complex operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const std::vector<Complex>& entries() const { return data_; }

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// Real counterpart, same storage convention. Carrier for the real-stacked
// equivalent channels of the orthogonal space-time decoder.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols);
  RealMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  static RealMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const std::vector<double>& entries() const { return data_; }

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix hermitian(const ComplexMatrix& a);

// Solves a x = b for Hermitian positive definite a via Cholesky (a = L L^H).
// Throws SingularMatrixError if a pivot is not strictly positive.
ComplexMatrix solve_hpd(const ComplexMatrix& a, const ComplexMatrix& b);

// log2 det(a) for HPD a, from the Cholesky factor (never via an explicit
// determinant product).
double logdet_hpd(const ComplexMatrix& a);

double frobenius_norm_sq(const ComplexMatrix& a);

// Real embedding [[Re, -Im], [Im, Re]]: a ring homomorphism, so complex
// products map to real products of the stacked matrices.
RealMatrix real_stack(const ComplexMatrix& a);

ComplexMatrix add(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix sub(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix scale(const ComplexMatrix& a, Complex factor);

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);
RealMatrix transpose(const RealMatrix& a);
std::vector<double> matvec(const RealMatrix& a, const std::vector<double>& x);
RealMatrix add(const RealMatrix& a, const RealMatrix& b);

}  // namespace mimolink
