#pragma once

// Skein-theoretic scalars over Q(zeta_p): quantum integers and factorials,
// loop values, theta and tetrahedral coefficients, braid eigenvalues.
// Everything is exact; a context fixes the level p and the choice of the
// 2p-th root A = A_t (t = twist exponent), and caches the small building
// blocks so repeated matrix assembly stays cheap.

#include <array>
#include <deque>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qblocks/cyclotomic.hpp"
#include "qblocks/graphs.hpp"

namespace qblocks {

class SkeinCtx {
 public:
  SkeinCtx(int p, int t_exp) : p_(p) {
    check_level(p);
    t_ = t_exp % p;
    if (t_ < 0) t_ += p;
    if (t_ == 0)
      throw std::invalid_argument("twist exponent must be nonzero mod p");
    CycNum A = root_at(p, t_);
    apow_.reserve(static_cast<std::size_t>(2 * p));
    CycNum cur = CycNum::one(p);
    for (int k = 0; k < 2 * p; ++k) {
      apow_.push_back(cur);
      cur = cur * A;
    }
  }

  // the distinguished root giving a positive-definite invariant form
  static SkeinCtx unitary(int p) { return SkeinCtx(p, unitary_exponent(p)); }

  int p() const { return p_; }
  int t() const { return t_; }
  const CycNum& A() const { return apow_[1]; }

  // A^e for any integer e (order of A is 2p)
  const CycNum& apow(long e) const {
    long m = e % (2 * p_);
    if (m < 0) m += 2 * p_;
    return apow_[static_cast<std::size_t>(m)];
  }

  // z = A^2 = zeta^t, the quantum parameter
  const CycNum& z() const { return apow(2); }

  // quantum integer [m] = (z^m - z^-m)/(z - z^-1), m >= 0
  const CycNum& qint(int m) const {
    if (m < 0) throw std::invalid_argument("qint of negative argument");
    extend_qint(m);
    return qint_[static_cast<std::size_t>(m)];
  }

  // [m]! = [1][2]...[m]
  const CycNum& qfact(int m) const {
    if (m < 0) throw std::invalid_argument("qfact of negative argument");
    extend_qfact(m);
    return qfact_[static_cast<std::size_t>(m)];
  }

  // loop value of a color-n strand
  CycNum delta(int n) const {
    const CycNum& v = qint(n + 1);
    return (n % 2 != 0) ? -v : v;
  }

  // theta-graph value for an admissible triple
  const CycNum& theta(int a, int b, int c) const {
    if (!admissible(p_, a, b, c))
      throw std::invalid_argument("theta on inadmissible triple (" +
                                  std::to_string(a) + "," + std::to_string(b) +
                                  "," + std::to_string(c) + ")");
    std::array<int, 3> key{a, b, c};
    auto it = theta_.find(key);
    if (it != theta_.end()) return it->second;
    int x = (a + b - c) / 2, y = (b + c - a) / 2, zz = (c + a - b) / 2;
    CycNum v = qfact(x + y + zz + 1) * qfact(x) * qfact(y) * qfact(zz) /
               (qfact(x + y) * qfact(y + zz) * qfact(x + zz));
    if ((x + y + zz) % 2 != 0) v = -v;
    return theta_.emplace(key, std::move(v)).first->second;
  }

  // tetrahedral coefficient with vertex triples
  // (a,b,e), (c,d,e), (a,d,f), (b,c,f)
  const CycNum& tet(int a, int b, int e, int c, int d, int f) const {
    std::array<int, 6> key{a, b, e, c, d, f};
    auto it = tet_.find(key);
    if (it != tet_.end()) return it->second;
    const int va[4] = {(a + b + e) / 2, (c + d + e) / 2, (a + d + f) / 2,
                       (b + c + f) / 2};
    const int tot = a + b + c + d + e + f;
    const int vb[3] = {(tot - a - c) / 2, (tot - b - d) / 2, (tot - e - f) / 2};
    CycNum ifac = CycNum::one(p_);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 4; ++i) {
        if (vb[j] < va[i])
          throw std::invalid_argument("tet on inadmissible labels");
        ifac = ifac * qfact(vb[j] - va[i]);
      }
    CycNum efac = qfact(a) * qfact(b) * qfact(c) * qfact(d) * qfact(e) * qfact(f);
    int lo = *std::max_element(va, va + 4);
    int hi = *std::min_element(vb, vb + 3);
    CycNum total = CycNum::zero(p_);
    for (int s = lo; s <= hi; ++s) {
      CycNum term = qfact(s + 1);
      for (int i = 0; i < 4; ++i) term = term / qfact(s - va[i]);
      for (int j = 0; j < 3; ++j) term = term / qfact(vb[j] - s);
      if (s % 2 != 0) term = -term;
      total = total + term;
    }
    CycNum v = ifac / efac * total;
    return tet_.emplace(key, std::move(v)).first->second;
  }

  // eigenvalue of the positive half-twist on two color-a strands fusing
  // into channel c
  CycNum braid_eigen(int a, int c) const {
    if (!admissible(p_, a, a, c))
      throw std::invalid_argument("braid channel not admissible");
    const CycNum& v = apow((static_cast<long>(c) * (c + 2) -
                            2L * a * (a + 2)) / 2);
    return (((2 * a - c) / 2) % 2 != 0) ? -v : v;
  }

 private:
  void extend_qint(int m) const {
    if (static_cast<std::size_t>(m) < qint_.size()) return;
    if (qint_.empty()) {
      qint_.push_back(CycNum::zero(p_));  // [0]
      qint_.push_back(CycNum::one(p_));   // [1]
    }
    CycNum denom = z() - apow(-2);
    for (int k = static_cast<int>(qint_.size()); k <= m; ++k)
      qint_.push_back((apow(2L * k) - apow(-2L * k)) / denom);
  }
  void extend_qfact(int m) const {
    if (static_cast<std::size_t>(m) < qfact_.size()) return;
    if (qfact_.empty()) qfact_.push_back(CycNum::one(p_));
    for (int k = static_cast<int>(qfact_.size()); k <= m; ++k)
      qfact_.push_back(qfact_.back() * qint(k));
  }

  int p_, t_;
  std::vector<CycNum> apow_;
  // deques: qint()/qfact() hand out references that must survive later growth
  mutable std::deque<CycNum> qint_;
  mutable std::deque<CycNum> qfact_;
  mutable std::map<std::array<int, 3>, CycNum> theta_;
  mutable std::map<std::array<int, 6>, CycNum> tet_;
};

}  // namespace qblocks
