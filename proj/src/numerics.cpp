#include "sudas/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sudas/errors.hpp"

namespace sudas {

namespace {

constexpr double kTruncation = 1e-12;

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput("matrix shape mismatch");
  }
}

// One-sided Jacobi on a tall matrix (rows >= cols).
SvdResult svd_tall(const ComplexMatrix& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  ComplexMatrix g = a;
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double alpha = 0.0;
        double beta = 0.0;
        cplx gamma = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          alpha += std::norm(g(r, p));
          beta += std::norm(g(r, q));
          gamma += std::conj(g(r, p)) * g(r, q);
        }
        const double mag = std::abs(gamma);
        if (mag == 0.0 || mag <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const cplx phase = std::conj(gamma) / mag;  // e^{-i phi}
        const double zeta = (beta - alpha) / (2.0 * mag);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        auto rotate = [&](ComplexMatrix& x, std::size_t rows) {
          for (std::size_t r = 0; r < rows; ++r) {
            const cplx xp = x(r, p);
            const cplx xq = x(r, q) * phase;
            x(r, p) = c * xp - s * xq;
            x(r, q) = s * xp + c * xq;
          }
        };
        rotate(g, m);
        rotate(v, n);
      }
    }
    if (!rotated) break;
  }

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) acc += std::norm(g(r, j));
    norms[j] = std::sqrt(acc);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  SvdResult out;
  out.u = ComplexMatrix(m, n);
  out.v = ComplexMatrix(n, n);
  out.sigma.resize(n);
  const double smax = n > 0 ? norms[order[0]] : 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    for (std::size_t r = 0; r < n; ++r) out.v(r, j) = v(r, src);
    const double sj = norms[src];
    const bool keep = sj > kTruncation * smax && sj > 0.0;
    out.sigma[j] = keep ? sj : 0.0;
    if (keep) {
      for (std::size_t r = 0; r < m; ++r) out.u(r, j) = g(r, src) / sj;
      continue;
    }
    // Complete U with a unit vector orthogonal to the previous columns.
    for (std::size_t e = 0; e < m; ++e) {
      std::vector<cplx> cand(m, 0.0);
      cand[e] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t c = 0; c < j; ++c) {
          cplx proj = 0.0;
          for (std::size_t r = 0; r < m; ++r) proj += std::conj(out.u(r, c)) * cand[r];
          for (std::size_t r = 0; r < m; ++r) cand[r] -= proj * out.u(r, c);
        }
      }
      double nrm = 0.0;
      for (const auto& x : cand) nrm += std::norm(x);
      nrm = std::sqrt(nrm);
      if (nrm > 0.5) {
        for (std::size_t r = 0; r < m; ++r) out.u(r, j) = cand[r] / nrm;
        break;
      }
    }
  }
  return out;
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw InvalidInput("entry count does not match shape");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols) { return {rows, cols}; }

ComplexMatrix ComplexMatrix::diagonal(const std::vector<cplx>& d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(const std::vector<double>& d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = std::conj((*this)(r, c));
  return t;
}

ComplexMatrix ComplexMatrix::left_columns(std::size_t n) const {
  if (n > cols_) throw InvalidInput("requested more columns than available");
  ComplexMatrix out(rows_, n);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = (*this)(r, c);
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& x : data_) acc += std::norm(x);
  return std::sqrt(acc);
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

cplx ComplexMatrix::trace() const {
  if (!is_square()) throw InvalidInput("trace of non-square matrix");
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& x : data_) x *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidInput("inner dimensions do not agree");
  ComplexMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cplx aik = a(i, k);
      if (aik == cplx(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

SvdResult svd(const ComplexMatrix& a) {
  if (!a.all_finite()) throw InvalidInput("svd: non-finite entry");
  if (a.rows() >= a.cols()) return svd_tall(a);
  SvdResult t = svd_tall(a.adjoint());
  return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
}

std::size_t numerical_rank(const std::vector<double>& sigma) {
  if (sigma.empty()) return 0;
  const double smax = *std::max_element(sigma.begin(), sigma.end());
  return static_cast<std::size_t>(std::count_if(
      sigma.begin(), sigma.end(), [&](double s) { return s > 0.0 && s > kTruncation * smax; }));
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  if (!a.is_square()) return false;
  const double scale = a.max_abs();
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = r; c < a.cols(); ++c)
      if (std::abs(a(r, c) - std::conj(a(c, r))) > rel_tol * scale) return false;
  return true;
}

ComplexMatrix cholesky(const ComplexMatrix& a) {
  if (!a.is_square()) throw DomainError("cholesky: matrix is not square");
  if (!a.all_finite()) throw DomainError("cholesky: non-finite entry");
  if (!is_hermitian(a)) throw DomainError("cholesky: matrix is not Hermitian");
  const std::size_t n = a.rows();
  ComplexMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > 0.0)) throw DomainError("cholesky: matrix is not positive definite");
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return l;
}

double logdet_hpd(const ComplexMatrix& a) {
  const ComplexMatrix l = cholesky(a);
  double acc = 0.0;
  for (std::size_t j = 0; j < l.rows(); ++j) acc += std::log2(l(j, j).real());
  return 2.0 * acc;
}

ComplexMatrix solve_hpd(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows()) throw InvalidInput("solve_hpd: shape mismatch");
  const ComplexMatrix l = cholesky(a);
  const std::size_t n = a.rows();
  ComplexMatrix x = b;
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
      cplx s = x(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj(l(k, ii)) * x(k, c);
      x(ii, c) = s / l(ii, ii);
    }
  }
  return x;
}

ComplexMatrix inverse_hpd(const ComplexMatrix& a) {
  ComplexMatrix inv = solve_hpd(a, ComplexMatrix::identity(a.rows()));
  // Restore exact Hermitian symmetry lost to rounding.
  for (std::size_t r = 0; r < inv.rows(); ++r) {
    inv(r, r) = inv(r, r).real();
    for (std::size_t c = r + 1; c < inv.cols(); ++c) {
      const cplx m = 0.5 * (inv(r, c) + std::conj(inv(c, r)));
      inv(r, c) = m;
      inv(c, r) = std::conj(m);
    }
  }
  return inv;
}

double offdiag_ratio(const ComplexMatrix& a) {
  if (!a.is_square()) throw InvalidInput("offdiag_ratio: matrix is not square");
  double off = 0.0;
  double all = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) {
      const double v = std::norm(a(r, c));
      all += v;
      if (r != c) off += v;
    }
  return std::sqrt(off) / std::max(std::sqrt(all), std::numeric_limits<double>::epsilon());
}

}  // namespace sudas
