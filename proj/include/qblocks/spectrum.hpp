#pragma once

// Finite/infinite-order verdicts for exact matrices.  The characteristic
// polynomial is computed over Q(zeta_p), its norm down to Q is taken by
// multiplying all Galois twists, and cyclotomic factors are peeled off by
// exact division.  Every eigenvalue is a root of unity iff nothing but
// cyclotomic factors appear; otherwise the non-cyclotomic residual factor is
// the witness.  A numeric embedding scan is used only as a sanity pre-filter,
// never as the decider.
//
// Also: the bounded word search over point-pushing operators — first
// non-scalar commutator and first word with an infinite-order verdict.

#include <numeric>
#include <string>
#include <vector>

#include "qblocks/matrix.hpp"
#include "qblocks/surfaces.hpp"

namespace qblocks {

using QPoly = std::vector<mpq_class>;  // coeffs[i] multiplies x^i

namespace detail {

inline void qp_trim(QPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

inline QPoly qp_mul(const QPoly& f, const QPoly& g) {
  if (f.empty() || g.empty()) return {};
  QPoly h(f.size() + g.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0) continue;
    for (std::size_t j = 0; j < g.size(); ++j)
      h[i + j] += f[i] * g[j];
  }
  return h;
}

// exact division; true iff g | f, with the quotient in q
inline bool qp_divides(const QPoly& f, const QPoly& g, QPoly& q) {
  QPoly r = f;
  qp_trim(r);
  QPoly gg = g;
  qp_trim(gg);
  if (gg.empty()) return false;
  if (r.size() < gg.size()) {
    if (r.empty()) {
      q.clear();
      return true;
    }
    return false;
  }
  q.assign(r.size() - gg.size() + 1, mpq_class(0));
  while (r.size() >= gg.size() && !r.empty()) {
    mpq_class c = r.back() / gg.back();
    std::size_t shift = r.size() - gg.size();
    q[shift] = c;
    for (std::size_t i = 0; i < gg.size(); ++i)
      r[shift + i] -= c * gg[i];
    qp_trim(r);
    if (!r.empty() && r.size() >= gg.size() && r.back() == 0)
      qp_trim(r);
  }
  return r.empty();
}

inline long euler_phi(long d) {
  long res = d;
  for (long f = 2; f * f <= d; ++f) {
    if (d % f) continue;
    res -= res / f;
    while (d % f == 0) d /= f;
  }
  if (d > 1) res -= res / d;
  return res;
}

// d-th cyclotomic polynomial: (x^d - 1) / prod of lower-index factors
inline const QPoly& cyclotomic_poly(long d) {
  static std::vector<QPoly> memo;  // memo[d]
  if (d < static_cast<long>(memo.size()) &&
      !memo[static_cast<std::size_t>(d)].empty())
    return memo[static_cast<std::size_t>(d)];
  if (d >= static_cast<long>(memo.size()))
    memo.resize(static_cast<std::size_t>(d) + 1);
  QPoly num(static_cast<std::size_t>(d) + 1, mpq_class(0));
  num[0] = -1;
  num[static_cast<std::size_t>(d)] = 1;
  for (long e = 1; e < d; ++e) {
    if (d % e) continue;
    QPoly q;
    if (!qp_divides(num, cyclotomic_poly(e), q))
      throw std::logic_error("cyclotomic tower division failed");
    num = std::move(q);
  }
  memo[static_cast<std::size_t>(d)] = std::move(num);
  return memo[static_cast<std::size_t>(d)];
}

}  // namespace detail

struct SpectrumReport {
  bool finite = false;
  long order = 0;          // lcm of the cyclotomic indices, when finite
  bool power_verified = false;  // M^order == Id checked exactly
  std::vector<long> cyclotomic_indices;
  QPoly witness_factor;    // non-cyclotomic residual, when infinite
  std::string note;
};

// the norm of the characteristic polynomial down to Q
inline QPoly charpoly_norm(const CycMatrix& M) {
  const int p = M.level();
  std::vector<CycNum> cp = M.char_poly();
  std::vector<CycNum> acc{CycNum::one(p)};
  for (int u = 1; u < p; ++u) {
    std::vector<CycNum> tw(cp.size(), CycNum::zero(p));
    for (std::size_t k = 0; k < cp.size(); ++k) tw[k] = cp[k].galois(u);
    std::vector<CycNum> next(acc.size() + tw.size() - 1, CycNum::zero(p));
    for (std::size_t a = 0; a < acc.size(); ++a) {
      if (acc[a].is_zero()) continue;
      for (std::size_t b = 0; b < tw.size(); ++b) {
        if (tw[b].is_zero()) continue;
        next[a + b] = next[a + b] + acc[a] * tw[b];
      }
    }
    acc = std::move(next);
  }
  QPoly out(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    if (!acc[k].is_rational())
      throw std::logic_error("norm polynomial has an irrational coefficient");
    out[k] = acc[k].rational_value();
  }
  detail::qp_trim(out);
  return out;
}

inline SpectrumReport spectrum_report(const CycMatrix& M) {
  SpectrumReport rep;
  QPoly f = charpoly_norm(M);
  const long deg0 = static_cast<long>(f.size()) - 1;
  const long d_bound = 2 * deg0 * deg0;
  for (long d = 1; d <= d_bound; ++d) {
    long remaining = static_cast<long>(f.size()) - 1;
    if (remaining <= 0) break;
    if (detail::euler_phi(d) > remaining) continue;
    bool took = false;
    QPoly q;
    while (detail::qp_divides(f, detail::cyclotomic_poly(d), q)) {
      f = q;
      took = true;
      if (static_cast<long>(f.size()) - 1 <= 0) break;
    }
    if (took) rep.cyclotomic_indices.push_back(d);
  }
  detail::qp_trim(f);
  if (static_cast<long>(f.size()) - 1 <= 0) {
    rep.finite = true;
    long l = 1;
    for (long d : rep.cyclotomic_indices) l = std::lcm(l, d);
    rep.order = l;
    if (l <= 10000) {
      rep.power_verified = M.pow(l).is_identity();
      if (!rep.power_verified) {
        // root-of-unity spectrum without semisimplicity: infinite order
        rep.finite = false;
        rep.order = 0;
        rep.note = "cyclotomic eigenvalues but the matrix power is not the "
                   "identity (non-semisimple)";
      }
    }
  } else {
    rep.finite = false;
    rep.witness_factor = f;
    rep.note = "non-cyclotomic factor of degree " +
               std::to_string(f.size() - 1) + " in the spectrum norm";
  }
  return rep;
}

inline std::string qpoly_to_string(const QPoly& f) {
  if (f.empty()) return "0";
  std::string s;
  for (std::size_t k = f.size(); k-- > 0;) {
    if (f[k] == 0) continue;
    if (!s.empty()) s += " + ";
    s += f[k].get_str();
    if (k > 0) s += "*x^" + std::to_string(k);
  }
  return s.empty() ? "0" : s;
}

// ---------------------------------------------------------------------------
// bounded word search over point-pushing operators
// ---------------------------------------------------------------------------

struct PushSearchResult {
  bool commutator_found = false;
  std::string commutator_u, commutator_v;  // [u,v] is not a scalar matrix
  bool infinite_found = false;
  std::string infinite_word;
  SpectrumReport infinite_report;
  long words_examined = 0;
};

namespace detail {

struct Letter {
  std::string text;  // word factor, e.g. "x" or "x^-1"
  int gen;           // index into pushes
  bool inv;
  const CycMatrix* fwd;
  CycMatrix invmat;
};

template <class F>
bool for_words_of_length(const std::vector<Letter>& letters, int len,
                         std::vector<int>& pick, std::vector<CycMatrix>& stack,
                         int depth, F&& fn) {
  if (depth == len) {
    std::string w;
    for (int idx : pick) {
      if (!w.empty()) w += '*';
      w += letters[static_cast<std::size_t>(idx)].text;
    }
    return fn(w, stack.back());
  }
  for (std::size_t l = 0; l < letters.size(); ++l) {
    if (depth > 0) {
      // skip immediate cancellation
      const Letter& prev =
          letters[static_cast<std::size_t>(pick[static_cast<std::size_t>(
              depth - 1)])];
      if (prev.gen == letters[l].gen && prev.inv != letters[l].inv) continue;
    }
    pick[static_cast<std::size_t>(depth)] = static_cast<int>(l);
    const CycMatrix& m =
        letters[l].inv ? letters[l].invmat : *letters[l].fwd;
    stack.push_back(stack.back() * m);
    bool stop = for_words_of_length(letters, len, pick, stack, depth + 1, fn);
    stack.pop_back();
    if (stop) return true;
  }
  return false;
}

}  // namespace detail

// Deterministic search, shortest words first, over the spec's based loops
// and their inverses.  Finds the first pair of words (total letters <= 4)
// whose commutator is not scalar, and the first word of length <= max_len
// whose spectrum verdict is infinite.
inline PushSearchResult push_search(const SurfaceRep& rep, int max_len) {
  PushSearchResult res;
  const int p = rep.space.p;
  const int dim = rep.space.dim();
  std::vector<detail::Letter> letters;
  for (std::size_t g = 0; g < rep.pushes.size(); ++g) {
    detail::Letter fwd{rep.pushes[g].name, static_cast<int>(g), false,
                       &rep.pushes[g].mat, CycMatrix()};
    detail::Letter bwd{rep.pushes[g].name + "^-1", static_cast<int>(g), true,
                       &rep.pushes[g].mat, rep.pushes[g].mat.inverse()};
    letters.push_back(std::move(fwd));
    letters.push_back(std::move(bwd));
  }
  if (letters.empty()) return res;

  // commutators of short words, total length <= max(4, max_len/2)
  const int comm_budget = std::max(4, max_len / 2);
  std::vector<std::pair<std::string, CycMatrix>> shorts;
  for (int len = 1; len <= comm_budget - 1; ++len) {
    std::vector<int> pick(static_cast<std::size_t>(len));
    std::vector<CycMatrix> stack{CycMatrix::identity(p, dim)};
    detail::for_words_of_length(
        letters, len, pick, stack, 0,
        [&](const std::string& w, const CycMatrix& m) {
          shorts.emplace_back(w, m);
          return false;
        });
  }
  for (std::size_t ui = 0; ui < shorts.size() && !res.commutator_found; ++ui)
    for (std::size_t vi = 0; vi < shorts.size(); ++vi) {
      const auto& [uw, um] = shorts[ui];
      const auto& [vw, vm] = shorts[vi];
      if (static_cast<int>(parse_word(uw).size() + parse_word(vw).size()) >
          comm_budget)
        continue;
      CycMatrix comm = um * vm * um.inverse() * vm.inverse();
      if (!is_scalar(comm)) {
        res.commutator_found = true;
        res.commutator_u = uw;
        res.commutator_v = vw;
        break;
      }
    }

  for (int len = 1; len <= max_len && !res.infinite_found; ++len) {
    std::vector<int> pick(static_cast<std::size_t>(len));
    std::vector<CycMatrix> stack{CycMatrix::identity(p, dim)};
    detail::for_words_of_length(
        letters, len, pick, stack, 0,
        [&](const std::string& w, const CycMatrix& m) {
          ++res.words_examined;
          SpectrumReport sr = spectrum_report(m);
          if (!sr.finite) {
            res.infinite_found = true;
            res.infinite_word = w;
            res.infinite_report = std::move(sr);
            return true;
          }
          return false;
        });
  }
  return res;
}

}  // namespace qblocks
