#pragma once

// Exact arithmetic in the cyclotomic field Q(zeta_p), p an odd prime.
//
// Elements are stored on the power basis zeta^0 .. zeta^{p-2} with exact
// rational coefficients; the reduction rule is
//     zeta^{p-1} = -(1 + zeta + ... + zeta^{p-2}).
// The 2p-th root of unity A lives inside Q(zeta_p) for odd p:
//     A_t = -zeta^{t(p+1)/2 mod p},   A_t^2 = zeta^t,  A_t^p = -1,
// so one field tower covers everything.  Floating point appears only in
// numeric embeddings and the root-of-unity pre-filter; every result-bearing
// computation is exact.

#include <gmpxx.h>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qblocks {

struct parse_error : std::runtime_error {
  std::size_t offset;
  parse_error(std::size_t off, const std::string& msg)
      : std::runtime_error(msg + " (byte " + std::to_string(off) + ")"),
        offset(off) {}
};

inline bool is_small_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// level of the theory: an odd prime >= 5.  p = 1 (mod 4) is accepted for
// arithmetic but callers that report results flag it (the positivity and
// lattice statements are cleanest at p = 3 mod 4).
inline void check_level(int p) {
  if (p < 5 || p % 2 == 0 || !is_small_prime(p))
    throw std::invalid_argument("level must be an odd prime >= 5, got " +
                                std::to_string(p));
}

class CycNum {
 public:
  CycNum() : p_(0) {}
  explicit CycNum(int p) : p_(p), c_(static_cast<std::size_t>(p - 1)) {
    check_level(p);
  }

  static CycNum zero(int p) { return CycNum(p); }
  static CycNum one(int p) {
    CycNum r(p);
    r.c_[0] = 1;
    return r;
  }
  static CycNum from_int(int p, long v) {
    CycNum r(p);
    r.c_[0] = v;
    return r;
  }
  static CycNum from_rational(int p, const mpq_class& v) {
    CycNum r(p);
    r.c_[0] = v;
    r.c_[0].canonicalize();
    return r;
  }
  // zeta^k, any integer k (reduced mod p)
  static CycNum zeta_pow(int p, long k) {
    CycNum r(p);
    k %= p;
    if (k < 0) k += p;
    if (k < p - 1) {
      r.c_[static_cast<std::size_t>(k)] = 1;
    } else {
      for (auto& q : r.c_) q = -1;
    }
    return r;
  }
  static CycNum zeta(int p) { return zeta_pow(p, 1); }

  int level() const { return p_; }
  const mpq_class& coeff(int k) const { return c_[static_cast<std::size_t>(k)]; }

  bool is_zero() const {
    for (const auto& q : c_)
      if (q != 0) return false;
    return true;
  }
  bool is_one() const {
    if (c_[0] != 1) return false;
    for (std::size_t k = 1; k < c_.size(); ++k)
      if (c_[k] != 0) return false;
    return true;
  }
  // lies in Q (only the zeta^0 coordinate populated)
  bool is_rational() const {
    for (std::size_t k = 1; k < c_.size(); ++k)
      if (c_[k] != 0) return false;
    return true;
  }
  mpq_class rational_value() const {
    if (!is_rational())
      throw std::invalid_argument("rational_value on a non-rational element");
    return c_[0];
  }

  friend CycNum operator+(const CycNum& a, const CycNum& b) {
    a.require_same(b);
    CycNum r(a.p_);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend CycNum operator-(const CycNum& a, const CycNum& b) {
    a.require_same(b);
    CycNum r(a.p_);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  CycNum operator-() const {
    CycNum r(p_);
    for (std::size_t k = 0; k < c_.size(); ++k) r.c_[k] = -c_[k];
    return r;
  }
  friend CycNum operator*(const CycNum& a, const CycNum& b) {
    a.require_same(b);
    const int p = a.p_;
    // accumulate by exponent mod p, then fold the zeta^{p-1} bucket
    std::vector<mpq_class> acc(static_cast<std::size_t>(p));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        if (b.c_[j] == 0) continue;
        acc[(i + j) % static_cast<std::size_t>(p)] += a.c_[i] * b.c_[j];
      }
    }
    CycNum r(p);
    const mpq_class& top = acc[static_cast<std::size_t>(p - 1)];
    for (std::size_t k = 0; k + 1 < acc.size(); ++k) r.c_[k] = acc[k] - top;
    return r;
  }
  friend CycNum operator*(const mpq_class& s, const CycNum& a) {
    CycNum r(a.p_);
    for (std::size_t k = 0; k < r.c_.size(); ++k) r.c_[k] = s * a.c_[k];
    return r;
  }
  friend CycNum operator*(const CycNum& a, const mpq_class& s) { return s * a; }

  // multiplicative inverse: solve (mult-by-this) x = 1 by Gaussian
  // elimination on the p-1 dimensional power basis
  CycNum inv() const {
    if (is_zero()) throw std::invalid_argument("inverse of zero");
    if (is_rational()) {
      CycNum r(p_);
      r.c_[0] = 1 / c_[0];
      return r;
    }
    const int n = p_ - 1;
    // column j of M = coefficients of this * zeta^j
    std::vector<std::vector<mpq_class>> M(
        static_cast<std::size_t>(n),
        std::vector<mpq_class>(static_cast<std::size_t>(n)));
    for (int j = 0; j < n; ++j) {
      CycNum col = *this * zeta_pow(p_, j);
      for (int i = 0; i < n; ++i)
        M[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            col.c_[static_cast<std::size_t>(i)];
    }
    std::vector<mpq_class> rhs(static_cast<std::size_t>(n));
    rhs[0] = 1;
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int r = col; r < n; ++r)
        if (M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
          piv = r;
          break;
        }
      if (piv < 0) throw std::runtime_error("singular multiplication matrix");
      std::swap(M[static_cast<std::size_t>(col)], M[static_cast<std::size_t>(piv)]);
      std::swap(rhs[static_cast<std::size_t>(col)], rhs[static_cast<std::size_t>(piv)]);
      mpq_class pv = M[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
      for (int j = 0; j < n; ++j) M[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] /= pv;
      rhs[static_cast<std::size_t>(col)] /= pv;
      for (int r = 0; r < n; ++r) {
        if (r == col) continue;
        mpq_class f = M[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
        if (f == 0) continue;
        for (int j = 0; j < n; ++j)
          M[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] -=
              f * M[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)];
        rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
      }
    }
    CycNum out(p_);
    out.c_ = std::move(rhs);
    return out;
  }
  friend CycNum operator/(const CycNum& a, const CycNum& b) { return a * b.inv(); }

  CycNum pow(long e) const {
    if (e < 0) return inv().pow(-e);
    CycNum r = one(p_), b = *this;
    while (e) {
      if (e & 1) r = r * b;
      b = b * b;
      e >>= 1;
    }
    return r;
  }

  // Galois automorphism sigma_u : zeta -> zeta^u, u not divisible by p
  CycNum galois(long u) const {
    long um = u % p_;
    if (um < 0) um += p_;
    if (um == 0) throw std::invalid_argument("galois index divisible by p");
    std::vector<mpq_class> acc(static_cast<std::size_t>(p_));
    for (std::size_t k = 0; k < c_.size(); ++k) {
      if (c_[k] == 0) continue;
      acc[static_cast<std::size_t>((static_cast<long>(k) * um) % p_)] += c_[k];
    }
    CycNum r(p_);
    const mpq_class& top = acc[static_cast<std::size_t>(p_ - 1)];
    for (std::size_t k = 0; k + 1 < acc.size(); ++k) r.c_[k] = acc[k] - top;
    return r;
  }
  // complex conjugation = sigma_{p-1}
  CycNum conj() const { return galois(p_ - 1); }

  friend bool operator==(const CycNum& a, const CycNum& b) {
    return a.p_ == b.p_ && a.c_ == b.c_;
  }
  friend bool operator!=(const CycNum& a, const CycNum& b) { return !(a == b); }

  // canonical text form: p:<int>;coeffs:<num>/<den>,...  (p-1 entries,
  // lowest terms, no whitespace)
  std::string serialize() const {
    std::string out = "p:" + std::to_string(p_) + ";coeffs:";
    for (std::size_t k = 0; k < c_.size(); ++k) {
      if (k) out += ',';
      out += c_[k].get_num().get_str();
      out += '/';
      out += c_[k].get_den().get_str();
    }
    return out;
  }

  // strict parser; base_offset shifts reported byte positions so callers
  // embedding this format in larger files can report absolute offsets
  static CycNum parse(const std::string& s, std::size_t base_offset = 0) {
    std::size_t pos = 0;
    auto fail = [&](const std::string& m) -> void {
      throw parse_error(base_offset + pos, m);
    };
    auto expect = [&](const std::string& lit) {
      if (s.compare(pos, lit.size(), lit) != 0) fail("expected '" + lit + "'");
      pos += lit.size();
    };
    auto read_int = [&](bool allow_sign) -> std::string {
      std::size_t start = pos;
      if (allow_sign && pos < s.size() && s[pos] == '-') ++pos;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
      if (pos == start || (s[start] == '-' && pos == start + 1))
        fail("expected integer");
      return s.substr(start, pos - start);
    };
    expect("p:");
    int p = 0;
    try {
      p = std::stoi(read_int(false));
    } catch (const std::exception&) {
      fail("level out of range");
    }
    check_level(p);
    expect(";coeffs:");
    CycNum r(p);
    for (int k = 0; k < p - 1; ++k) {
      if (k) expect(",");
      std::string num = read_int(true);
      expect("/");
      std::string den = read_int(false);
      mpq_class q(num + "/" + den);
      mpq_class canon = q;
      canon.canonicalize();
      if (canon.get_num() != q.get_num() || canon.get_den() != q.get_den())
        fail("coefficient not in lowest terms");
      r.c_[static_cast<std::size_t>(k)] = canon;
    }
    if (pos != s.size()) fail("trailing characters");
    return r;
  }

 private:
  void require_same(const CycNum& o) const {
    if (p_ != o.p_)
      throw std::invalid_argument("mixed levels: " + std::to_string(p_) +
                                  " vs " + std::to_string(o.p_));
  }
  int p_;
  std::vector<mpq_class> c_;
};

// ---------------------------------------------------------------------------
// roots, embeddings, root-of-unity detection
// ---------------------------------------------------------------------------

// A_t = -zeta^{t(p+1)/2 mod p}; every primitive 2p-th root arises this way
inline CycNum root_at(int p, int t) {
  check_level(p);
  int tm = t % p;
  if (tm < 0) tm += p;
  if (tm == 0) throw std::invalid_argument("root exponent must be nonzero mod p");
  long e = (static_cast<long>(tm) * ((p + 1) / 2)) % p;
  return -CycNum::zeta_pow(p, e);
}

// exponent t of the unitary root: A_{t} matches
// (-1)^{(p-1)/2} exp((p+1) pi i / 2p) under the principal embedding
inline int unitary_exponent(int p) { return (p + 1) / 2; }

// the 2p-th root A; with unitary set this is the distinguished positive-form
// root, otherwise the t = 1 Galois representative
inline CycNum make_root(int p, bool unitary = true) {
  return root_at(p, unitary ? unitary_exponent(p) : 1);
}

// numeric value under sigma_e : zeta -> exp(2 pi i e / p)
inline std::complex<double> complex_embed(const CycNum& x, int e) {
  const int p = x.level();
  int em = e % p;
  if (em < 0) em += p;
  if (em == 0) throw std::invalid_argument("embedding index divisible by p");
  const double two_pi = 6.283185307179586476925286766559;
  std::complex<double> acc(0.0, 0.0);
  for (int k = 0; k < p - 1; ++k) {
    double ck = x.coeff(k).get_d();
    if (ck == 0.0) continue;
    double ang = two_pi * static_cast<double>((static_cast<long>(em) * k) % p) /
                 static_cast<double>(p);
    acc += ck * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return acc;
}

// representatives of the embeddings up to complex conjugation
inline std::vector<int> embeddings(int p) {
  check_level(p);
  std::vector<int> out;
  for (int e = 1; e <= (p - 1) / 2; ++e) out.push_back(e);
  return out;
}

// Decision with witness.  The numeric pre-filter can only refute (any
// embedding with |x| off 1 by more than 1e-9 disproves); the exact power
// check is the authority for "true".  Roots of unity in Q(zeta_p) are
// exactly +-zeta^k, so possible orders are the divisors of 2p.
struct RootOfUnityResult {
  bool is_root = false;
  long order = 0;        // valid when is_root
  int witness_embedding = 0;  // >0: embedding refuting; -1: exact power refuted
  double witness_modulus = 0.0;
};

inline RootOfUnityResult is_root_of_unity(const CycNum& x) {
  if (x.is_zero()) throw std::invalid_argument("is_root_of_unity(0)");
  const int p = x.level();
  RootOfUnityResult res;
  for (int e : embeddings(p)) {
    double m = std::abs(complex_embed(x, e));
    if (std::abs(m - 1.0) > 1e-9) {
      res.is_root = false;
      res.witness_embedding = e;
      res.witness_modulus = m;
      return res;
    }
  }
  const CycNum one = CycNum::one(p);
  for (long k : {1L, 2L, static_cast<long>(p), 2L * p}) {
    if (x.pow(k) == one) {
      res.is_root = true;
      res.order = k;
      res.witness_modulus = 1.0;
      return res;
    }
  }
  res.is_root = false;
  res.witness_embedding = -1;  // passed the filter yet is no root: exact refuter
  res.witness_modulus = 1.0;
  return res;
}

}  // namespace qblocks
