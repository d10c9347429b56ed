#pragma once

// Dense matrices over Q(zeta_p) with the operations representation checks
// rely on: exact products and inverses, conjugate transpose, determinants,
// characteristic polynomials, scalar-proportionality tests, and unitarity
// with respect to a diagonal Hermitian form.  Products skip zero entries, so
// the (frequent) diagonal and block-sparse matrices stay cheap despite the
// dense layout.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qblocks/cyclotomic.hpp"

namespace qblocks {

class CycMatrix {
 public:
  CycMatrix() : p_(0), rows_(0), cols_(0) {}
  CycMatrix(int p, int rows, int cols)
      : p_(p),
        rows_(rows),
        cols_(cols),
        a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols),
           CycNum::zero(p)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative shape");
  }

  static CycMatrix identity(int p, int n) {
    CycMatrix m(p, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = CycNum::one(p);
    return m;
  }
  static CycMatrix diagonal(int p, const std::vector<CycNum>& d) {
    CycMatrix m(p, static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i)
      m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
  }

  int level() const { return p_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }

  CycNum& at(int i, int j) {
    return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
              static_cast<std::size_t>(j)];
  }
  const CycNum& at(int i, int j) const {
    return a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
              static_cast<std::size_t>(j)];
  }

  friend bool operator==(const CycMatrix& x, const CycMatrix& y) {
    return x.p_ == y.p_ && x.rows_ == y.rows_ && x.cols_ == y.cols_ &&
           x.a_ == y.a_;
  }
  friend bool operator!=(const CycMatrix& x, const CycMatrix& y) {
    return !(x == y);
  }

  friend CycMatrix operator+(const CycMatrix& x, const CycMatrix& y) {
    x.require_shape(y);
    CycMatrix r(x.p_, x.rows_, x.cols_);
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = x.a_[k] + y.a_[k];
    return r;
  }
  friend CycMatrix operator-(const CycMatrix& x, const CycMatrix& y) {
    x.require_shape(y);
    CycMatrix r(x.p_, x.rows_, x.cols_);
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = x.a_[k] - y.a_[k];
    return r;
  }
  friend CycMatrix operator*(const CycNum& s, const CycMatrix& x) {
    CycMatrix r(x.p_, x.rows_, x.cols_);
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] = s * x.a_[k];
    return r;
  }

  friend CycMatrix operator*(const CycMatrix& x, const CycMatrix& y) {
    if (x.p_ != y.p_) throw std::invalid_argument("level mismatch");
    if (x.cols_ != y.rows_) throw std::invalid_argument("shape mismatch");
    CycMatrix r(x.p_, x.rows_, y.cols_);
    for (int i = 0; i < x.rows_; ++i)
      for (int k = 0; k < x.cols_; ++k) {
        const CycNum& xik = x.at(i, k);
        if (xik.is_zero()) continue;
        for (int j = 0; j < y.cols_; ++j) {
          const CycNum& ykj = y.at(k, j);
          if (ykj.is_zero()) continue;
          r.at(i, j) = r.at(i, j) + xik * ykj;
        }
      }
    return r;
  }

  CycMatrix transpose() const {
    CycMatrix r(p_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }
  CycMatrix conj_transpose() const {
    CycMatrix r(p_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j).conj();
    return r;
  }
  // entrywise complex conjugation (no transpose)
  CycMatrix conj() const {
    CycMatrix r(p_, rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k].conj();
    return r;
  }
  // entrywise Galois twist zeta -> zeta^u
  CycMatrix galois(long u) const {
    CycMatrix r(p_, rows_, cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k].galois(u);
    return r;
  }

  CycMatrix inverse() const {
    require_square();
    const int n = rows_;
    CycMatrix L(*this), R = identity(p_, n);
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = col; r < n; ++r)
        if (!L.at(r, col).is_zero()) {
          piv = r;
          break;
        }
      if (piv < 0) throw std::runtime_error("matrix not invertible");
      if (piv != col) {
        L.swap_rows(piv, col);
        R.swap_rows(piv, col);
      }
      CycNum inv_piv = L.at(col, col).inv();
      L.scale_row(col, inv_piv);
      R.scale_row(col, inv_piv);
      for (int r = 0; r < n; ++r) {
        if (r == col || L.at(r, col).is_zero()) continue;
        CycNum f = L.at(r, col);
        L.submul_row(r, col, f);
        R.submul_row(r, col, f);
      }
    }
    return R;
  }

  CycMatrix pow(long e) const {
    require_square();
    if (e < 0) return inverse().pow(-e);
    CycMatrix r = identity(p_, rows_), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  CycNum trace() const {
    require_square();
    CycNum t = CycNum::zero(p_);
    for (int i = 0; i < rows_; ++i) t = t + at(i, i);
    return t;
  }

  CycNum det() const {
    require_square();
    const int n = rows_;
    CycMatrix L(*this);
    CycNum d = CycNum::one(p_);
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = col; r < n; ++r)
        if (!L.at(r, col).is_zero()) {
          piv = r;
          break;
        }
      if (piv < 0) return CycNum::zero(p_);
      if (piv != col) {
        L.swap_rows(piv, col);
        d = -d;
      }
      d = d * L.at(col, col);
      CycNum inv_piv = L.at(col, col).inv();
      for (int r = col + 1; r < n; ++r) {
        if (L.at(r, col).is_zero()) continue;
        CycNum f = L.at(r, col) * inv_piv;
        for (int j = col; j < n; ++j)
          L.at(r, j) = L.at(r, j) - f * L.at(col, j);
      }
    }
    return d;
  }

  // characteristic polynomial det(xI - M), coefficients c[0..n] with
  // c[n] = 1, by the trace recursion (division-free apart from exact
  // rational divisions by 1..n)
  std::vector<CycNum> char_poly() const {
    require_square();
    const int n = rows_;
    std::vector<CycNum> c(static_cast<std::size_t>(n + 1), CycNum::zero(p_));
    c[static_cast<std::size_t>(n)] = CycNum::one(p_);
    CycMatrix Mk = *this;
    for (int k = 1; k <= n; ++k) {
      if (k > 1) {
        CycMatrix shifted = Mk;
        const CycNum& ck = c[static_cast<std::size_t>(n - k + 1)];
        for (int i = 0; i < n; ++i)
          shifted.at(i, i) = shifted.at(i, i) + ck;
        Mk = *this * shifted;
      }
      CycNum t = Mk.trace();
      c[static_cast<std::size_t>(n - k)] = -(t * mpq_class(1, k));
    }
    return c;
  }

  bool is_identity() const {
    if (rows_ != cols_) return false;
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) {
        if (i == j ? !at(i, j).is_one() : !at(i, j).is_zero()) return false;
      }
    return true;
  }

 private:
  void require_square() const {
    if (rows_ != cols_) throw std::invalid_argument("matrix not square");
  }
  void require_shape(const CycMatrix& o) const {
    if (p_ != o.p_ || rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("shape/level mismatch");
  }
  void swap_rows(int r1, int r2) {
    for (int j = 0; j < cols_; ++j) std::swap(at(r1, j), at(r2, j));
  }
  void scale_row(int r, const CycNum& s) {
    for (int j = 0; j < cols_; ++j)
      if (!at(r, j).is_zero()) at(r, j) = s * at(r, j);
  }
  void submul_row(int dst, int src, const CycNum& f) {
    if (f.is_zero()) return;
    for (int j = 0; j < cols_; ++j)
      if (!at(src, j).is_zero()) at(dst, j) = at(dst, j) - f * at(src, j);
  }

  int p_;
  int rows_, cols_;
  std::vector<CycNum> a_;
};

// c with X == c * Y, when such a scalar exists
inline std::optional<CycNum> scalar_ratio(const CycMatrix& X, const CycMatrix& Y) {
  if (X.level() != Y.level() || X.rows() != Y.rows() || X.cols() != Y.cols())
    return std::nullopt;
  const int p = X.level();
  std::optional<CycNum> c;
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j < X.cols(); ++j) {
      const CycNum& x = X.at(i, j);
      const CycNum& y = Y.at(i, j);
      if (y.is_zero()) {
        if (!x.is_zero()) return std::nullopt;
        continue;
      }
      if (!c) {
        c = x / y;
      } else if (x != *c * y) {
        return std::nullopt;
      }
    }
  if (!c) c = CycNum::zero(p);  // Y == 0 forces X == 0; any scalar works
  return c;
}

inline std::optional<CycNum> scalar_of(const CycMatrix& M) {
  if (M.rows() != M.cols()) return std::nullopt;
  return scalar_ratio(M, CycMatrix::identity(M.level(), M.rows()));
}

inline bool is_scalar(const CycMatrix& M) {
  return scalar_of(M).has_value();
}

// M^dagger H M for the diagonal Hermitian form H = diag(wts)
inline CycMatrix apply_form(const CycMatrix& M, const std::vector<CycNum>& wts) {
  if (static_cast<int>(wts.size()) != M.rows())
    throw std::invalid_argument("form size mismatch");
  CycMatrix HM(M.level(), M.rows(), M.cols());
  for (int i = 0; i < M.rows(); ++i)
    for (int j = 0; j < M.cols(); ++j)
      HM.at(i, j) = wts[static_cast<std::size_t>(i)] * M.at(i, j);
  return M.conj_transpose() * HM;
}

// scalar c with M^dagger H M = c H, when one exists
inline std::optional<CycNum> hermit_scalar(const CycMatrix& M,
                                           const std::vector<CycNum>& wts) {
  return scalar_ratio(apply_form(M, wts), CycMatrix::diagonal(M.level(), wts));
}

// exact H-unitarity
inline bool hermit_ok(const CycMatrix& M, const std::vector<CycNum>& wts) {
  auto c = hermit_scalar(M, wts);
  return c && c->is_one();
}

}  // namespace qblocks
