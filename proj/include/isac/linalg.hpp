#pragma once

// Dense complex linear algebra for the small Hermitian problems that show up
// in subset selection: eigendecomposition, log-determinants, inverses, and the
// rank-one / row-column-deletion inverse updates the greedy selectors rely on.
//
// Sizes here are at most a few dozen, so everything is plain O(n^3) loops on a
// row-major std::vector. All inverse state is kept explicitly (no factor
// caches) because the selectors update inverses directly.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isac/errors.hpp"

namespace isac {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ModelError("CMatrix: data size does not match dimensions");
    }
  }
  CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ModelError("CMatrix: ragged initializer");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static CMatrix diagonal(std::span<const double> d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool is_square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<cplx> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const cplx> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  CVector col(std::size_t j) const {
    CVector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }

  CMatrix adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
    return out;
  }

  CMatrix transpose() const {
    CMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  CMatrix& operator+=(const CMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(cplx s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
  friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw ModelError("CMatrix: inner dimensions differ");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    }
    return out;
  }

  friend CVector operator*(const CMatrix& a, std::span<const cplx> x) {
    if (a.cols_ != x.size()) throw ModelError("CMatrix: vector length differs");
    CVector out(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      cplx acc{};
      for (std::size_t j = 0; j < a.cols_; ++j) acc += a(i, j) * x[j];
      out[i] = acc;
    }
    return out;
  }

  friend bool operator==(const CMatrix&, const CMatrix&) = default;

 private:
  void check_same_shape(const CMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ModelError("CMatrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

// ---------------------------------------------------------------------------
// Small helpers

inline double frobenius_norm(const CMatrix& a) {
  double s = 0.0;
  for (const auto& x : a.data()) s += std::norm(x);
  return std::sqrt(s);
}

inline double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (const auto& x : a.data()) m = std::max(m, std::abs(x));
  return m;
}

inline bool all_finite(const CMatrix& a) {
  return std::all_of(a.data().begin(), a.data().end(),
                     [](const cplx& x) { return std::isfinite(x.real()) && std::isfinite(x.imag()); });
}

inline bool is_hermitian(const CMatrix& a, double rel_tol = 1e-10) {
  if (!a.is_square()) return false;
  const double scale = max_abs(a);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > rel_tol * scale) return false;
  return true;
}

// ||a - b||_F / max(||b||_F, tiny)
inline double relative_error(const CMatrix& a, const CMatrix& b) {
  const double denom = std::max(frobenius_norm(b), 1e-300);
  return frobenius_norm(a - b) / denom;
}

inline double squared_norm(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

// u^H v
inline cplx inner(std::span<const cplx> u, std::span<const cplx> v) {
  cplx s{};
  for (std::size_t i = 0; i < u.size(); ++i) s += std::conj(u[i]) * v[i];
  return s;
}

// u^H M u, real part (M Hermitian).
inline double quadratic_form(const CMatrix& m, std::span<const cplx> u) {
  const CVector mu = m * u;
  return inner(u, mu).real();
}

inline CMatrix outer(std::span<const cplx> u, std::span<const cplx> v) {
  CMatrix out(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out(i, j) = u[i] * std::conj(v[j]);
  return out;
}

// A A^H
inline CMatrix gram_rows(const CMatrix& a) {
  CMatrix g(a.rows(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = i; j < a.rows(); ++j) {
      cplx s{};
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * std::conj(a(j, k));
      g(i, j) = s;
      g(j, i) = std::conj(s);
    }
    g(i, i) = g(i, i).real();
  }
  return g;
}

// A^H A
inline CMatrix gram_cols(const CMatrix& a) {
  CMatrix g(a.cols(), a.cols());
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = i; j < a.cols(); ++j) {
      cplx s{};
      for (std::size_t k = 0; k < a.rows(); ++k) s += std::conj(a(k, i)) * a(k, j);
      g(i, j) = s;
      g(j, i) = std::conj(s);
    }
    g(i, i) = g(i, i).real();
  }
  return g;
}

// I + s*M
inline CMatrix identity_plus(const CMatrix& m, double s) {
  CMatrix out = m * cplx{s};
  for (std::size_t i = 0; i < out.rows(); ++i) out(i, i) += 1.0;
  return out;
}

// Rows and columns picked by (0-based) index lists, in list order.
inline CMatrix submatrix(const CMatrix& a, std::span<const std::size_t> rows,
                         std::span<const std::size_t> cols) {
  CMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  return out;
}

inline CMatrix principal_submatrix(const CMatrix& a, std::span<const std::size_t> idx) {
  return submatrix(a, idx, idx);
}

// Force exact Hermitian symmetry: (A + A^H) / 2.
inline void symmetrize(CMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < a.cols(); ++j) {
      const cplx avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic complex Jacobi)

struct EigenPair {
  std::vector<double> values;  // descending
  CMatrix vectors;             // column k pairs with values[k]
};

struct JacobiOptions {
  double off_diagonal_tol = 1e-12;  // relative to ||A||_F
  int max_sweeps = 100;
};

inline EigenPair hermitian_evd(const CMatrix& input, const JacobiOptions& opt = {}) {
  if (!input.is_square()) throw ModelError("hermitian_evd: matrix is not square");
  if (!all_finite(input)) throw ModelError("hermitian_evd: non-finite entry");
  if (!is_hermitian(input)) throw ModelError("hermitian_evd: matrix is not Hermitian");

  const std::size_t n = input.rows();
  CMatrix a = input;
  symmetrize(a);
  CMatrix v = CMatrix::identity(n);

  auto off_mass = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  const double scale = frobenius_norm(a);
  const double target = opt.off_diagonal_tol * scale;
  int sweep = 0;
  while (scale > 0.0 && off_mass() > target) {
    if (++sweep > opt.max_sweeps) throw NumericError("hermitian_evd: Jacobi sweeps did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag == 0.0) continue;
        // Phase-normalize the (p,q) block to a real symmetric one, then apply
        // the classical real rotation. Combined unitary: V = diag(1, e^{-i phi}) * R.
        const cplx phase = apq / mag;  // e^{i phi}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx vpp = c;
        const cplx vpq = s;
        const cplx vqp = -s * std::conj(phase);
        const cplx vqq = c * std::conj(phase);

        // A <- A V (columns p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = akp * vpp + akq * vqp;
          a(k, q) = akp * vpq + akq * vqq;
        }
        // A <- V^H A (rows p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = std::conj(vpp) * apk + std::conj(vqp) * aqk;
          a(q, k) = std::conj(vpq) * apk + std::conj(vqq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (std::size_t k = 0; k < n; ++k) {
          const cplx vkp = v(k, p);
          const cplx vkq = v(k, q);
          v(k, p) = vkp * vpp + vkq * vqp;
          v(k, q) = vkp * vpq + vkq * vqq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });

  EigenPair out{std::vector<double>(n), CMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

// Eigenvalues within [-tol*lambda_max, 0) are rounding noise on a PSD matrix.
inline constexpr double kPsdTolerance = 1e-10;

inline void clamp_psd_eigenvalues(std::vector<double>& values) {
  const double lmax = values.empty() ? 0.0 : std::max(0.0, values.front());
  for (double& l : values) {
    if (l >= 0.0) continue;
    if (l < -kPsdTolerance * lmax)
      throw NumericError("matrix is not positive semidefinite (eigenvalue " + std::to_string(l) + ")");
    l = 0.0;
  }
}

// ---------------------------------------------------------------------------
// Cholesky, log-determinant, inverse

// Lower-triangular L with A = L L^H, or nullopt if a pivot is not safely positive.
inline std::optional<CMatrix> cholesky(const CMatrix& a) {
  const std::size_t n = a.rows();
  CMatrix l(n, n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, a(i, i).real());
  const double floor = 1e-14 * std::max(scale, 1e-300);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > floor)) return std::nullopt;
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

// log2 |A| for Hermitian PSD A. Uses Cholesky when A is comfortably positive
// definite and falls back to the eigenvalues otherwise (singular A gives -inf).
inline double logdet_psd(const CMatrix& a) {
  if (!a.is_square()) throw ModelError("logdet_psd: matrix is not square");
  if (a.rows() == 0) return 0.0;
  if (!all_finite(a)) throw ModelError("logdet_psd: non-finite entry");
  if (auto l = cholesky(a)) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += std::log2((*l)(i, i).real());
    return 2.0 * s;
  }
  EigenPair evd = hermitian_evd(a);
  clamp_psd_eigenvalues(evd.values);
  double s = 0.0;
  for (double l : evd.values) s += std::log2(l);
  return s;
}

// Inverse of a Hermitian positive definite matrix, symmetrized on output.
inline CMatrix inverse_hermitian(const CMatrix& a) {
  if (!a.is_square()) throw ModelError("inverse_hermitian: matrix is not square");
  const std::size_t n = a.rows();
  const auto l = cholesky(a);
  if (!l) throw NumericError("inverse_hermitian: matrix is not positive definite");
  // Solve L Y = I, then L^H X = Y.
  CMatrix y(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = (i == c) ? cplx{1.0} : cplx{};
      for (std::size_t k = 0; k < i; ++k) s -= (*l)(i, k) * y(k, c);
      y(i, c) = s / (*l)(i, i);
    }
  }
  CMatrix x(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t ii = n; ii-- > 0;) {
      cplx s = y(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= std::conj((*l)(k, ii)) * x(k, c);
      x(ii, c) = s / (*l)(ii, ii);
    }
  }
  symmetrize(x);
  return x;
}

// ---------------------------------------------------------------------------
// Inverse updates

inline constexpr double kSingularThreshold = 1e-12;

// Given inv = M^{-1} (M Hermitian), returns (M - c u u^H)^{-1}
//   = inv + (c / (1 - c u^H inv u)) (inv u)(inv u)^H.
inline CMatrix rank_one_inverse_update(const CMatrix& inv, std::span<const cplx> u, double c) {
  if (!inv.is_square() || inv.rows() != u.size())
    throw ModelError("rank_one_inverse_update: dimension mismatch");
  if (c == 0.0) return inv;
  const CVector w = inv * u;
  const double denom = 1.0 - c * inner(u, w).real();
  if (std::abs(denom) < kSingularThreshold)
    throw SingularUpdateError("rank_one_inverse_update: denominator at machine zero");
  const double scale = c / denom;
  CMatrix out = inv;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += scale * w[i] * std::conj(w[j]);
  symmetrize(out);
  return out;
}

// Cyclic permutation that moves position j to the end and shifts the later
// positions up by one: perm[k] is the source index of permuted position k.
inline std::vector<std::size_t> move_to_back_permutation(std::size_t n, std::size_t j) {
  std::vector<std::size_t> perm;
  perm.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    if (k != j) perm.push_back(k);
  perm.push_back(j);
  return perm;
}

// Given inv = M^{-1}, returns the inverse of M with row/column j (0-based)
// deleted. The permuted inverse is split as [[X11, x12], [x21, x22]] and the
// result is the Schur complement X11 - x12 x21 / x22.
inline CMatrix remove_rowcol_inverse(const CMatrix& inv, std::size_t j) {
  if (!inv.is_square()) throw ModelError("remove_rowcol_inverse: matrix is not square");
  const std::size_t n = inv.rows();
  if (j >= n) throw ModelError("remove_rowcol_inverse: index out of range");
  const auto perm = move_to_back_permutation(n, j);
  const CMatrix permuted = principal_submatrix(inv, perm);

  const cplx pivot = permuted(n - 1, n - 1);
  if (std::abs(pivot) < kSingularThreshold)
    throw SingularUpdateError("remove_rowcol_inverse: Schur pivot at machine zero");

  CMatrix out(n - 1, n - 1);
  for (std::size_t r = 0; r + 1 < n; ++r)
    for (std::size_t c = 0; c + 1 < n; ++c)
      out(r, c) = permuted(r, c) - permuted(r, n - 1) * permuted(n - 1, c) / pivot;
  symmetrize(out);
  return out;
}

}  // namespace isac
