#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace sudas {

using cplx = std::complex<double>;

// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols);
  static ComplexMatrix diagonal(const std::vector<cplx>& d);
  static ComplexMatrix diagonal(const std::vector<double>& d);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<cplx>& entries() const { return data_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ComplexMatrix adjoint() const;
  // First n columns.
  ComplexMatrix left_columns(std::size_t n) const;
  double frobenius_norm() const;
  double max_abs() const;
  bool all_finite() const;
  bool is_square() const { return rows_ == cols_; }
  cplx trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

  bool operator==(const ComplexMatrix& o) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx s, ComplexMatrix a);

struct SvdResult {
  ComplexMatrix u;            // rows x r, orthonormal columns
  std::vector<double> sigma;  // r values, descending
  ComplexMatrix v;            // cols x r, orthonormal columns
};

// Thin SVD, r = min(rows, cols), by one-sided Jacobi. Values below
// 1e-12 * sigma_max are set to zero.
SvdResult svd(const ComplexMatrix& a);

// Count of singular values above the truncation threshold.
std::size_t numerical_rank(const std::vector<double>& sigma);

// log2 det(A) via Cholesky. Throws DomainError if A is not HPD.
double logdet_hpd(const ComplexMatrix& a);

// Lower Cholesky factor of an HPD matrix. Throws DomainError otherwise.
ComplexMatrix cholesky(const ComplexMatrix& a);

// A^{-1} B for HPD A.
ComplexMatrix solve_hpd(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix inverse_hpd(const ComplexMatrix& a);

// ||A - diag(A)||_F / max(||A||_F, eps).
double offdiag_ratio(const ComplexMatrix& a);

bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-12);

}  // namespace sudas
