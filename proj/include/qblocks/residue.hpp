#pragma once

// Residue fields of the cyclotomic integers.  A prime q != p factors the
// p-th cyclotomic polynomial over F_q into distinct irreducible factors, all
// of degree f = ord_p(q); each factor is a prime ideal above q with residue
// field F_{q^f}.  This header factors the cyclotomic polynomial
// deterministically, builds the residue fields, and reduces exact elements
// of Q(zeta_p) along a chosen factor.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qblocks/cyclotomic.hpp"

namespace qblocks {

struct bad_prime_error : std::runtime_error {
  std::string entry;  // serialization of the offending element
  bad_prime_error(const std::string& msg, const std::string& ent)
      : std::runtime_error(msg), entry(ent) {}
};

namespace fq {

// dense polynomials over F_q, coefficients ascending, normalized (no
// trailing zeros)
using Poly = std::vector<long>;

inline long norm_mod(long v, long q) {
  long r = v % q;
  return r < 0 ? r + q : r;
}

inline void trim(Poly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline Poly mul(const Poly& a, const Poly& b, long q) {
  if (a.empty() || b.empty()) return {};
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i]) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + static_cast<__int128>(a[i]) * b[j]) % q;
  }
  trim(c);
  return c;
}

inline long inv_mod(long a, long q) {
  // Fermat; q prime
  long r = 1, b = norm_mod(a, q), e = q - 2;
  while (e) {
    if (e & 1) r = static_cast<long>(static_cast<__int128>(r) * b % q);
    b = static_cast<long>(static_cast<__int128>(b) * b % q);
    e >>= 1;
  }
  return r;
}

inline Poly rem(Poly a, const Poly& m, long q) {
  trim(a);
  if (m.empty()) throw std::invalid_argument("division by zero polynomial");
  long lead_inv = inv_mod(m.back(), q);
  while (a.size() >= m.size()) {
    long c = static_cast<long>(static_cast<__int128>(a.back()) * lead_inv % q);
    std::size_t shift = a.size() - m.size();
    if (c)
      for (std::size_t i = 0; i < m.size(); ++i)
        a[shift + i] = norm_mod(a[shift + i] - static_cast<long>(
                                    static_cast<__int128>(c) * m[i] % q),
                                q);
    trim(a);
  }
  return a;
}

inline Poly mulmod(const Poly& a, const Poly& b, const Poly& m, long q) {
  return rem(mul(a, b, q), m, q);
}

inline Poly powmod(Poly base, const mpz_class& e, const Poly& m, long q) {
  Poly r{1};
  base = rem(std::move(base), m, q);
  mpz_class k = e;
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) r = mulmod(r, base, m, q);
    base = mulmod(base, base, m, q);
    k >>= 1;
  }
  return r;
}

inline Poly make_monic(Poly f, long q) {
  trim(f);
  if (f.empty()) return f;
  long c = inv_mod(f.back(), q);
  for (auto& v : f) v = static_cast<long>(static_cast<__int128>(v) * c % q);
  return f;
}

inline Poly gcd(Poly a, Poly b, long q) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = rem(a, b, q);
    a = std::move(b);
    b = std::move(r);
  }
  return make_monic(std::move(a), q);
}

}  // namespace fq

// trial-division primality for long (moduli are small)
inline bool is_small_prime_long(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// multiplicative order of q modulo p
inline int residue_degree(long q, int p) {
  check_level(p);
  long r = fq::norm_mod(q, p);
  if (r == 0)
    throw std::invalid_argument("q = p is ramified; choose q != p");
  int f = 1;
  long acc = r;
  while (acc != 1) {
    acc = acc * r % p;
    ++f;
  }
  return f;
}

// Deterministic factorization of the p-th cyclotomic polynomial over F_q.
// All factors share degree f; equal-degree splitting sweeps candidate
// polynomials in lexicographic order, so the factor list (sorted by
// ascending coefficient tuple) is a stable fingerprint of (p, q).
inline std::vector<fq::Poly> phi_factors(int p, long q) {
  const int f = residue_degree(q, p);
  fq::Poly phi(static_cast<std::size_t>(p), 1 % q);  // 1 + x + ... + x^{p-1}
  fq::trim(phi);
  std::vector<fq::Poly> done, work{phi};
  if (!is_small_prime_long(q))
    throw std::invalid_argument("modulus must be prime");

  // enumerate monic polynomials of degree d in lex coefficient order
  auto for_each_monic = [&](int d, auto&& fn) -> bool {
    std::vector<long> c(static_cast<std::size_t>(d), 0);
    while (true) {
      fq::Poly h(c);
      h.push_back(1);
      if (fn(h)) return true;
      int pos = 0;
      while (pos < d && ++c[static_cast<std::size_t>(pos)] == q) {
        c[static_cast<std::size_t>(pos)] = 0;
        ++pos;
      }
      if (pos == d) return false;
    }
  };

  mpz_class qf = 1;
  for (int s = 0; s < f; ++s) qf *= q;
  const mpz_class half = (qf - 1) / 2;

  while (!work.empty()) {
    fq::Poly g = std::move(work.back());
    work.pop_back();
    const int dg = static_cast<int>(g.size()) - 1;
    if (dg == f) {
      done.push_back(std::move(g));
      continue;
    }
    bool split = false;
    for (int hd = 1; hd <= dg - 1 && !split; ++hd) {
      for_each_monic(hd, [&](const fq::Poly& h) {
        fq::Poly t;
        if (q == 2) {
          // trace map over F_{2^f}
          fq::Poly acc = fq::rem(h, g, q), pw = acc;
          for (int s = 1; s < f; ++s) {
            pw = fq::mulmod(pw, pw, g, q);
            acc.resize(std::max(acc.size(), pw.size()), 0);
            for (std::size_t ii = 0; ii < pw.size(); ++ii)
              acc[ii] = (acc[ii] + pw[ii]) % 2;
            fq::trim(acc);
          }
          t = std::move(acc);
        } else {
          t = fq::powmod(h, half, g, q);
          if (t.empty())
            t = {fq::norm_mod(-1, q)};
          else
            t[0] = fq::norm_mod(t[0] - 1, q);
          fq::trim(t);
        }
        fq::Poly d1 = fq::gcd(t, g, q);
        if (d1.size() > 1 && d1.size() < g.size()) {
          fq::Poly q2;
          // exact division g / d1
          {
            fq::Poly a = g;
            fq::trim(a);
            q2.assign(a.size() - d1.size() + 1, 0);
            long li = fq::inv_mod(d1.back(), q);
            while (a.size() >= d1.size() && !a.empty()) {
              long c = static_cast<long>(
                  static_cast<__int128>(a.back()) * li % q);
              std::size_t shift = a.size() - d1.size();
              q2[shift] = c;
              for (std::size_t ii = 0; ii < d1.size(); ++ii)
                a[shift + ii] = fq::norm_mod(
                    a[shift + ii] -
                        static_cast<long>(
                            static_cast<__int128>(c) * d1[ii] % q),
                    q);
              fq::trim(a);
            }
            if (!a.empty())
              throw std::logic_error("factor does not divide");
          }
          work.push_back(fq::make_monic(std::move(d1), q));
          work.push_back(fq::make_monic(std::move(q2), q));
          split = true;
          return true;
        }
        return false;
      });
    }
    if (!split)
      throw std::logic_error("equal-degree splitting failed to progress");
  }
  std::sort(done.begin(), done.end());
  return done;
}

struct SplittingData {
  long q;
  int p;
  int f;                          // residue degree
  std::vector<fq::Poly> moduli;   // sorted irreducible factors, (p-1)/f many
};

inline SplittingData splitting_data(long q, int p) {
  SplittingData sd;
  sd.q = q;
  sd.p = p;
  sd.f = residue_degree(q, p);
  sd.moduli = phi_factors(p, q);
  return sd;
}

// residue field F_{q^f} = F_q[X]/(modulus); alpha = class of X is the image
// of zeta_p
class ResidueField {
 public:
  using Elt = std::vector<long>;  // f coefficients, ascending

  ResidueField(long q, int p, fq::Poly modulus)
      : q_(q), p_(p), mod_(std::move(modulus)) {
    f_ = static_cast<int>(mod_.size()) - 1;
    if (f_ < 1) throw std::invalid_argument("modulus must be non-constant");
  }

  static ResidueField from_splitting(const SplittingData& sd, int index) {
    if (index < 0 || index >= static_cast<int>(sd.moduli.size()))
      throw std::invalid_argument("modulus index out of range");
    return ResidueField(sd.q, sd.p,
                        sd.moduli[static_cast<std::size_t>(index)]);
  }

  long q() const { return q_; }
  int p() const { return p_; }
  int f() const { return f_; }
  const fq::Poly& modulus() const { return mod_; }
  mpz_class size() const {
    mpz_class s = 1;
    for (int k = 0; k < f_; ++k) s *= q_;
    return s;
  }

  Elt zero() const { return Elt(static_cast<std::size_t>(f_), 0); }
  Elt one() const {
    Elt e = zero();
    e[0] = 1 % q_;
    return e;
  }
  Elt from_int(long v) const {
    Elt e = zero();
    e[0] = fq::norm_mod(v, q_);
    return e;
  }
  Elt alpha() const {
    if (f_ == 1) return from_int(-mod_[0]);
    Elt e = zero();
    e[1] = 1;
    return e;
  }
  bool is_zero(const Elt& a) const {
    for (long v : a)
      if (v) return false;
    return true;
  }

  Elt add(const Elt& a, const Elt& b) const {
    Elt c = a;
    for (int k = 0; k < f_; ++k)
      c[static_cast<std::size_t>(k)] = fq::norm_mod(
          c[static_cast<std::size_t>(k)] + b[static_cast<std::size_t>(k)], q_);
    return c;
  }
  Elt sub(const Elt& a, const Elt& b) const {
    Elt c = a;
    for (int k = 0; k < f_; ++k)
      c[static_cast<std::size_t>(k)] = fq::norm_mod(
          c[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)], q_);
    return c;
  }
  Elt neg(const Elt& a) const {
    Elt c = a;
    for (auto& v : c) v = fq::norm_mod(-v, q_);
    return c;
  }
  Elt mul(const Elt& a, const Elt& b) const {
    fq::Poly pa(a.begin(), a.end()), pb(b.begin(), b.end());
    fq::trim(pa);
    fq::trim(pb);
    fq::Poly pc = fq::mulmod(pa, pb, mod_, q_);
    pc.resize(static_cast<std::size_t>(f_), 0);
    return Elt(pc.begin(), pc.end());
  }
  Elt pow(const Elt& a, const mpz_class& e) const {
    if (e < 0) return pow(inv(a), -e);
    Elt r = one(), b = a;
    mpz_class k = e;
    while (k > 0) {
      if (mpz_odd_p(k.get_mpz_t())) r = mul(r, b);
      b = mul(b, b);
      k >>= 1;
    }
    return r;
  }
  Elt inv(const Elt& a) const {
    if (is_zero(a)) throw std::invalid_argument("inverse of zero residue");
    return pow(a, size() - 2);
  }
  // Frobenius x -> x^q
  Elt frobenius(const Elt& a) const { return pow(a, mpz_class(q_)); }

  // multiplicative order, capped; 0 if the cap is exceeded
  long elt_order(const Elt& a, long cap = 1000000) const {
    if (is_zero(a)) throw std::invalid_argument("order of zero");
    Elt acc = a;
    for (long k = 1; k <= cap; ++k) {
      if (acc == one()) return k;
      acc = mul(acc, a);
    }
    return 0;
  }

  // canonical text form of an element
  std::string serialize(const Elt& a) const {
    std::string s = "q:" + std::to_string(q_) + ";f:" + std::to_string(f_) +
                    ";mod:";
    for (std::size_t k = 0; k < mod_.size(); ++k) {
      if (k) s += ',';
      s += std::to_string(mod_[k]);
    }
    s += ";val:";
    for (int k = 0; k < f_; ++k) {
      if (k) s += ',';
      s += std::to_string(a[static_cast<std::size_t>(k)]);
    }
    return s;
  }

  friend bool operator==(const ResidueField& a, const ResidueField& b) {
    return a.q_ == b.q_ && a.p_ == b.p_ && a.mod_ == b.mod_;
  }

 private:
  long q_;
  int p_;
  int f_;
  fq::Poly mod_;
};

// exact reduction of x in Q(zeta_p) along the chosen prime above q; throws
// bad_prime_error when a denominator vanishes mod q
inline ResidueField::Elt reduce_mod(const CycNum& x, const ResidueField& F) {
  if (x.level() != F.p())
    throw std::invalid_argument("level mismatch in reduction");
  const long q = F.q();
  ResidueField::Elt alpha = F.alpha();
  ResidueField::Elt acc = F.zero();
  for (int k = x.level() - 2; k >= 0; --k) {
    acc = F.mul(acc, alpha);
    const mpq_class& c = x.coeff(k);
    long num = static_cast<long>(mpz_fdiv_ui(c.get_num().get_mpz_t(),
                                             static_cast<unsigned long>(q)));
    long den = static_cast<long>(mpz_fdiv_ui(c.get_den().get_mpz_t(),
                                             static_cast<unsigned long>(q)));
    if (c != 0 && den == 0)
      throw bad_prime_error(
          "denominator divisible by q = " + std::to_string(q), x.serialize());
    if (num != 0) {
      long v = static_cast<long>(
          static_cast<__int128>(num) * fq::inv_mod(den, q) % q);
      acc = F.add(acc, F.from_int(v));
    }
  }
  return acc;
}

}  // namespace qblocks
