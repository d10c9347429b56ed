#pragma once

// Finite quotients of the exact representations.  Matrices over a residue
// field are flat coefficient arrays; the closure routine enumerates the
// generated matrix group breadth-first with a hard element cap, and the
// comparison helpers decide whether two generator sets span the same
// subgroup, producing explicit word certificates where possible.

#include <cstdint>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "qblocks/matrix.hpp"
#include "qblocks/residue.hpp"
#include "qblocks/surfaces.hpp"

namespace qblocks {

// n x n matrix over a residue field; entry (i,j) occupies the f coefficients
// starting at ((i*n)+j)*f
struct RMat {
  int n = 0;
  std::vector<long> e;
};

inline RMat rmat_zero(const ResidueField& F, int n) {
  RMat m;
  m.n = n;
  m.e.assign(static_cast<std::size_t>(n) * n * F.f(), 0);
  return m;
}

inline ResidueField::Elt rmat_get(const ResidueField& F, const RMat& m, int i,
                                  int j) {
  const int f = F.f();
  std::size_t base = (static_cast<std::size_t>(i) * m.n + j) * f;
  return ResidueField::Elt(m.e.begin() + base, m.e.begin() + base + f);
}

inline void rmat_set(const ResidueField& F, RMat& m, int i, int j,
                     const ResidueField::Elt& v) {
  const int f = F.f();
  std::size_t base = (static_cast<std::size_t>(i) * m.n + j) * f;
  for (int k = 0; k < f; ++k) m.e[base + k] = v[static_cast<std::size_t>(k)];
}

inline RMat rmat_identity(const ResidueField& F, int n) {
  RMat m = rmat_zero(F, n);
  for (int i = 0; i < n; ++i) rmat_set(F, m, i, i, F.one());
  return m;
}

inline bool rmat_is_identity(const ResidueField& F, const RMat& m) {
  return m.e == rmat_identity(F, m.n).e;
}

inline RMat rmat_mul(const ResidueField& F, const RMat& a, const RMat& b) {
  if (a.n != b.n) throw std::invalid_argument("size mismatch");
  const int n = a.n;
  RMat c = rmat_zero(F, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      ResidueField::Elt aik = rmat_get(F, a, i, k);
      if (F.is_zero(aik)) continue;
      for (int j = 0; j < n; ++j) {
        ResidueField::Elt bkj = rmat_get(F, b, k, j);
        if (F.is_zero(bkj)) continue;
        rmat_set(F, c, i, j,
                 F.add(rmat_get(F, c, i, j), F.mul(aik, bkj)));
      }
    }
  return c;
}

inline RMat rmat_transpose(const ResidueField& F, const RMat& a) {
  RMat c = rmat_zero(F, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j) rmat_set(F, c, j, i, rmat_get(F, a, i, j));
  return c;
}

inline RMat rmat_scalar(const ResidueField& F, const RMat& a,
                        const ResidueField::Elt& s) {
  RMat c = rmat_zero(F, a.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < a.n; ++j)
      rmat_set(F, c, i, j, F.mul(s, rmat_get(F, a, i, j)));
  return c;
}

inline RMat rmat_inverse(const ResidueField& F, const RMat& a) {
  const int n = a.n;
  std::vector<ResidueField::Elt> left(static_cast<std::size_t>(n) * n),
      right(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      left[static_cast<std::size_t>(i) * n + j] = rmat_get(F, a, i, j);
      right[static_cast<std::size_t>(i) * n + j] =
          i == j ? F.one() : F.zero();
    }
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!F.is_zero(left[static_cast<std::size_t>(r) * n + col])) {
        piv = r;
        break;
      }
    if (piv < 0) throw std::runtime_error("residue matrix not invertible");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(left[static_cast<std::size_t>(piv) * n + j],
                  left[static_cast<std::size_t>(col) * n + j]);
        std::swap(right[static_cast<std::size_t>(piv) * n + j],
                  right[static_cast<std::size_t>(col) * n + j]);
      }
    ResidueField::Elt pivinv =
        F.inv(left[static_cast<std::size_t>(col) * n + col]);
    for (int j = 0; j < n; ++j) {
      auto& l = left[static_cast<std::size_t>(col) * n + j];
      auto& r = right[static_cast<std::size_t>(col) * n + j];
      l = F.mul(l, pivinv);
      r = F.mul(r, pivinv);
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      ResidueField::Elt factor = left[static_cast<std::size_t>(r) * n + col];
      if (F.is_zero(factor)) continue;
      for (int j = 0; j < n; ++j) {
        left[static_cast<std::size_t>(r) * n + j] =
            F.sub(left[static_cast<std::size_t>(r) * n + j],
                  F.mul(factor, left[static_cast<std::size_t>(col) * n + j]));
        right[static_cast<std::size_t>(r) * n + j] =
            F.sub(right[static_cast<std::size_t>(r) * n + j],
                  F.mul(factor, right[static_cast<std::size_t>(col) * n + j]));
      }
    }
  }
  RMat inv = rmat_zero(F, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      rmat_set(F, inv, i, j, right[static_cast<std::size_t>(i) * n + j]);
  return inv;
}

inline RMat rmat_pow(const ResidueField& F, RMat base, long k) {
  if (k < 0) return rmat_pow(F, rmat_inverse(F, base), -k);
  RMat r = rmat_identity(F, base.n);
  while (k > 0) {
    if (k & 1) r = rmat_mul(F, r, base);
    base = rmat_mul(F, base, base);
    k >>= 1;
  }
  return r;
}

// order of a residue matrix, capped; 0 if the cap is exceeded
inline long rmat_order(const ResidueField& F, const RMat& m,
                       long cap = 1000000) {
  RMat acc = m;
  for (long k = 1; k <= cap; ++k) {
    if (rmat_is_identity(F, acc)) return k;
    acc = rmat_mul(F, acc, m);
  }
  return 0;
}

inline RMat reduce_matrix(const CycMatrix& m, const ResidueField& F) {
  RMat r = rmat_zero(F, m.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      rmat_set(F, r, i, j, reduce_mod(m.at(i, j), F));
  return r;
}

// residue check of the invariance identity: reduce the exact conjugate
// transpose, then test  C^T diag(w) M == diag(w)  in the residue field
inline bool residue_unitary(const ResidueField& F, const CycMatrix& m,
                            const std::vector<CycNum>& wts) {
  const int n = m.rows();
  RMat rm = reduce_matrix(m, F);
  RMat rc = reduce_matrix(m.conj(), F);  // entrywise conj, not transposed
  std::vector<ResidueField::Elt> w;
  w.reserve(wts.size());
  for (const auto& x : wts) w.push_back(reduce_mod(x, F));
  // (conj M)^T diag(w) M
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ResidueField::Elt acc = F.zero();
      for (int k = 0; k < n; ++k)
        acc = F.add(acc, F.mul(F.mul(rmat_get(F, rc, k, i),
                                     w[static_cast<std::size_t>(k)]),
                               rmat_get(F, rm, k, j)));
      ResidueField::Elt want =
          i == j ? w[static_cast<std::size_t>(i)] : F.zero();
      if (acc != want) return false;
    }
  return true;
}

// ---------------------------------------------------------------------------
// reduced representations

struct ResidueRep {
  ResidueField field;
  SurfaceSpec spec;
  int p = 0;
  int t = 0;
  int dim = 0;
  std::vector<ResidueField::Elt> weights;
  std::vector<std::pair<std::string, RMat>> curves;
  std::vector<std::pair<std::string, RMat>> pushes;
};

inline ResidueRep reduce_rep(const SurfaceRep& rep, const ResidueField& F,
                             bool verify_invariance = true) {
  ResidueRep rr{F, rep.space.spec, rep.space.p, rep.space.t,
                rep.space.dim(), {}, {}, {}};
  rr.weights.reserve(rep.space.weights.size());
  for (const auto& w : rep.space.weights)
    rr.weights.push_back(reduce_mod(w, F));
  for (const auto& nm : rep.curves) {
    if (verify_invariance && !residue_unitary(F, nm.mat, rep.space.weights))
      throw std::runtime_error("reduced matrix loses form invariance: " +
                               nm.name);
    rr.curves.emplace_back(nm.name, reduce_matrix(nm.mat, F));
  }
  for (const auto& nm : rep.pushes) {
    if (verify_invariance && !residue_unitary(F, nm.mat, rep.space.weights))
      throw std::runtime_error("reduced matrix loses form invariance: " +
                               nm.name);
    rr.pushes.emplace_back(nm.name, reduce_matrix(nm.mat, F));
  }
  return rr;
}

// ---------------------------------------------------------------------------
// closure enumeration

// scale so that the first nonzero entry (row-major) is 1; canonical
// representative of the projective class
inline RMat projective_normalize(const ResidueField& F, const RMat& m) {
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) {
      ResidueField::Elt v = rmat_get(F, m, i, j);
      if (!F.is_zero(v)) {
        if (v == F.one()) return m;
        return rmat_scalar(F, m, F.inv(v));
      }
    }
  throw std::invalid_argument("zero matrix has no projective class");
}

inline bool closure_key_fits_u64(const ResidueField& F, int n) {
  const int digits = n * n * F.f();
  unsigned long long bound = 1;
  for (int k = 0; k < digits; ++k) {
    if (bound > (1ULL << 62) / static_cast<unsigned long long>(F.q()))
      return false;
    bound *= static_cast<unsigned long long>(F.q());
  }
  return true;
}

inline std::uint64_t closure_key_u64(const ResidueField& F, const RMat& m) {
  std::uint64_t key = 0;
  for (std::size_t k = m.e.size(); k-- > 0;)
    key = key * static_cast<std::uint64_t>(F.q()) +
          static_cast<std::uint64_t>(m.e[k]);
  return key;
}

inline std::string closure_key_str(const RMat& m) {
  std::string s;
  s.reserve(m.e.size() * 4);
  for (long v : m.e) {
    std::uint32_t u = static_cast<std::uint32_t>(v);
    s.push_back(static_cast<char>(u & 0xff));
    s.push_back(static_cast<char>((u >> 8) & 0xff));
    s.push_back(static_cast<char>((u >> 16) & 0xff));
    s.push_back(static_cast<char>((u >> 24) & 0xff));
  }
  return s;
}

inline RMat closure_key_decode_u64(const ResidueField& F, int n,
                                   std::uint64_t key) {
  RMat m = rmat_zero(F, n);
  const std::uint64_t q = static_cast<std::uint64_t>(F.q());
  for (std::size_t k = 0; k < m.e.size(); ++k) {
    m.e[k] = static_cast<long>(key % q);
    key /= q;
  }
  return m;
}

inline RMat closure_key_decode_str(const ResidueField& F, int n,
                                   const std::string& s) {
  RMat m = rmat_zero(F, n);
  for (std::size_t k = 0; k < m.e.size(); ++k) {
    std::uint32_t u = 0;
    for (int b = 3; b >= 0; --b)
      u = (u << 8) | static_cast<unsigned char>(s[4 * k + b]);
    m.e[k] = static_cast<long>(u);
  }
  return m;
}

struct ClosureResult {
  bool complete = false;
  std::string status;        // "complete" or "cap-exceeded"
  mpz_class order = 0;       // meaningful only when complete
  std::uint64_t visited = 0; // distinct elements enumerated so far
  bool projective = false;
  bool order_divides_group = false;  // |GL| (or |PGL|) divisibility, when complete
  bool used_u64_keys = false;
  std::vector<std::uint64_t> keys64;   // sorted when complete
  std::vector<std::string> keys_str;   // sorted when complete
};

inline mpz_class gl_order(const ResidueField& F, int n) {
  mpz_class Q = F.size(), qn = 1, total = 1;
  for (int k = 0; k < n; ++k) qn *= Q;
  mpz_class qi = 1;
  for (int i = 0; i < n; ++i) {
    total *= (qn - qi);
    qi *= Q;
  }
  return total;
}

inline mpz_class pgl_order(const ResidueField& F, int n) {
  return gl_order(F, n) / (F.size() - 1);
}

// Breadth-first closure of the group generated by `gens`.  Deterministic:
// the frontier is a FIFO queue seeded with the identity, and each element is
// multiplied on the right by the generators and their inverses in declared
// order.  When the element count would exceed `cap` the enumeration aborts;
// a capped run never reports an order.
inline ClosureResult group_closure(const ResidueField& F,
                                   const std::vector<RMat>& gens,
                                   std::uint64_t cap = 10000000,
                                   bool projective = false) {
  ClosureResult res;
  res.projective = projective;
  if (gens.empty()) throw std::invalid_argument("empty generator list");
  const int n = gens.front().n;
  std::vector<RMat> step;
  for (const auto& g : gens) step.push_back(g);
  for (const auto& g : gens) step.push_back(rmat_inverse(F, g));
  if (projective)
    for (auto& g : step) g = projective_normalize(F, g);

  const bool u64 = closure_key_fits_u64(F, n);
  res.used_u64_keys = u64;
  std::unordered_set<std::uint64_t> seen64;
  std::unordered_set<std::string> seenstr;
  // the frontier holds packed keys, decoded on pop, so a capped run does not
  // pin millions of expanded matrices
  std::queue<std::uint64_t> fifo64;
  std::queue<std::string> fifostr;
  auto insert = [&](const RMat& m) -> bool {
    if (u64) {
      std::uint64_t k = closure_key_u64(F, m);
      if (!seen64.insert(k).second) return false;
      fifo64.push(k);
      return true;
    }
    std::string k = closure_key_str(m);
    if (!seenstr.insert(k).second) return false;
    fifostr.push(k);
    return true;
  };
  RMat id = rmat_identity(F, n);
  if (projective) id = projective_normalize(F, id);
  insert(id);
  std::uint64_t count = 1;
  bool capped = false;
  while ((u64 ? !fifo64.empty() : !fifostr.empty()) && !capped) {
    RMat cur;
    if (u64) {
      cur = closure_key_decode_u64(F, n, fifo64.front());
      fifo64.pop();
    } else {
      cur = closure_key_decode_str(F, n, fifostr.front());
      fifostr.pop();
    }
    for (const auto& g : step) {
      RMat nxt = rmat_mul(F, cur, g);
      if (projective) nxt = projective_normalize(F, nxt);
      if (insert(nxt)) {
        if (++count > cap) {
          capped = true;
          break;
        }
      }
    }
  }
  res.visited = count;
  if (capped) {
    res.complete = false;
    res.status = "cap-exceeded";
    return res;
  }
  res.complete = true;
  res.status = "complete";
  res.order = mpz_class(static_cast<unsigned long>(count & 0xffffffffULL)) +
              (mpz_class(static_cast<unsigned long>(count >> 32)) << 32);
  if (u64) {
    res.keys64.assign(seen64.begin(), seen64.end());
    std::sort(res.keys64.begin(), res.keys64.end());
  } else {
    res.keys_str.assign(seenstr.begin(), seenstr.end());
    std::sort(res.keys_str.begin(), res.keys_str.end());
  }
  mpz_class ambient = projective ? pgl_order(F, n) : gl_order(F, n);
  res.order_divides_group =
      mpz_divisible_p(ambient.get_mpz_t(), res.order.get_mpz_t()) != 0;
  return res;
}

inline bool closure_contains(const ResidueField& F, const ClosureResult& cl,
                             const RMat& m) {
  if (!cl.complete)
    throw std::logic_error("membership lookup requires a complete closure");
  RMat probe = cl.projective ? projective_normalize(F, m) : m;
  if (cl.used_u64_keys) {
    std::uint64_t k = closure_key_u64(F, probe);
    return std::binary_search(cl.keys64.begin(), cl.keys64.end(), k);
  }
  std::string k = closure_key_str(probe);
  return std::binary_search(cl.keys_str.begin(), cl.keys_str.end(), k);
}

// ---------------------------------------------------------------------------
// word evaluation over named residue matrices

inline RMat eval_rmat_word(
    const ResidueField& F,
    const std::vector<std::pair<std::string, RMat>>& dict,
    const std::string& word) {
  auto letters = parse_word(word);
  if (letters.empty()) throw std::invalid_argument("empty word");
  const int n = dict.front().second.n;
  RMat acc = rmat_identity(F, n);
  for (const auto& [name, expo] : letters) {
    const RMat* m = nullptr;
    for (const auto& [nm, mat] : dict)
      if (nm == name) {
        m = &mat;
        break;
      }
    if (!m) throw std::invalid_argument("unknown letter in word: " + name);
    acc = rmat_mul(F, acc, rmat_pow(F, *m, expo));
  }
  return acc;
}

// ---------------------------------------------------------------------------
// membership with certificates

struct MembershipHint {
  std::string target;  // name of the element to certify
  std::string word;    // word over the host generators (and earlier targets)
};

struct MembershipOutcome {
  std::string status;  // "certified" | "member" | "not-member" | "undecided"
  std::string word;    // certificate word when one is known
};

namespace detail {

// Forward half of the two-sided search: a seeded random walk from the
// identity over the host generators and their inverses, with every visited
// position keyed exactly.  Building it is the expensive part, and it depends
// only on (host, seed, steps), so callers with several targets share one.
struct WalkTable {
  std::vector<RMat> step;
  std::vector<std::string> letter;
  std::vector<std::size_t> fchoice;
  std::unordered_map<std::string, std::uint64_t> forward;
  std::uint64_t steps = 0;
};

inline std::string walk_key(const ResidueField& F, bool u64, bool projective,
                            const RMat& x) {
  RMat c = projective ? projective_normalize(F, x) : x;
  if (u64) {
    std::uint64_t k = closure_key_u64(F, c);
    return std::string(reinterpret_cast<const char*>(&k), sizeof(k));
  }
  return closure_key_str(c);
}

inline WalkTable build_walk_table(
    const ResidueField& F,
    const std::vector<std::pair<std::string, RMat>>& host, int n,
    bool projective, std::uint64_t seed, std::uint64_t steps) {
  WalkTable t;
  t.steps = steps;
  for (const auto& [nm, g] : host) {
    t.step.push_back(g);
    t.letter.push_back(nm);
  }
  for (const auto& [nm, g] : host) {
    t.step.push_back(rmat_inverse(F, g));
    t.letter.push_back(nm + "^-1");
  }
  const bool u64 = closure_key_fits_u64(F, n);
  std::mt19937_64 rng_f(seed);
  std::uniform_int_distribution<std::size_t> pick(0, 2 * host.size() - 1);
  RMat cur = rmat_identity(F, n);
  t.forward.reserve(static_cast<std::size_t>(steps) + 1);
  t.forward.emplace(walk_key(F, u64, projective, cur), 0);
  for (std::uint64_t s = 1; s <= steps; ++s) {
    std::size_t k = pick(rng_f);
    t.fchoice.push_back(k);
    cur = rmat_mul(F, cur, t.step[k]);
    t.forward.emplace(walk_key(F, u64, projective, cur), s);
  }
  return t;
}

// Seeded two-sided random-walk search: a key collision between the forward
// table and a walk from the target yields target = w_f * w_t^{-1}, which is
// freely reduced and then re-evaluated exactly before being reported.
inline MembershipOutcome birthday_membership(
    const ResidueField& F,
    const std::vector<std::pair<std::string, RMat>>& host, const RMat& target,
    bool projective, std::uint64_t seed, std::uint64_t steps,
    const WalkTable* table = nullptr) {
  MembershipOutcome out{"undecided", ""};
  const int n = target.n;
  const std::size_t m = host.size();
  WalkTable local;
  if (!table) {
    local = build_walk_table(F, host, n, projective, seed, steps);
    table = &local;
  }
  const bool u64 = closure_key_fits_u64(F, n);

  std::mt19937_64 rng_t(seed + 1);
  std::uniform_int_distribution<std::size_t> pick(0, 2 * m - 1);
  std::vector<std::size_t> tchoice;
  RMat tcur = target;
  auto try_match = [&](std::uint64_t tlen) -> bool {
    auto it = table->forward.find(walk_key(F, u64, projective, tcur));
    if (it == table->forward.end()) return false;
    std::vector<std::size_t> reduced;
    auto push_letter = [&](std::size_t k) {
      std::size_t inv = k < m ? k + m : k - m;
      if (!reduced.empty() && reduced.back() == inv)
        reduced.pop_back();
      else
        reduced.push_back(k);
    };
    for (std::uint64_t s = 0; s < it->second; ++s)
      push_letter(table->fchoice[static_cast<std::size_t>(s)]);
    for (std::uint64_t s = tlen; s-- > 0;) {
      std::size_t k = tchoice[static_cast<std::size_t>(s)];
      push_letter(k < m ? k + m : k - m);
    }
    if (reduced.empty()) {
      // the target itself keyed as identity
      if (target.e == rmat_identity(F, n).e) {
        out = {"certified", ""};
        return true;
      }
      if (projective &&
          projective_normalize(F, target).e == rmat_identity(F, n).e) {
        out = {"certified", ""};
        return true;
      }
      return false;
    }
    RMat check = rmat_identity(F, n);
    for (std::size_t k : reduced) check = rmat_mul(F, check, table->step[k]);
    bool ok = projective
                  ? projective_normalize(F, check).e ==
                        projective_normalize(F, target).e
                  : check.e == target.e;
    if (ok) {
      std::string word;
      for (std::size_t k : reduced) {
        if (!word.empty()) word += '*';
        word += table->letter[k];
      }
      out = {"certified", word};
      return true;
    }
    return false;
  };
  if (try_match(0)) return out;
  for (std::uint64_t s = 1; s <= steps; ++s) {
    std::size_t k = pick(rng_t);
    tchoice.push_back(k);
    tcur = rmat_mul(F, tcur, table->step[k]);
    if (try_match(s)) return out;
  }
  return out;
}

}  // namespace detail

// Decide membership of a named target in the subgroup generated by `host`.
// Order of attempts: explicit hint word, lookup in a complete closure,
// seeded birthday search.
inline MembershipOutcome certify_membership(
    const ResidueField& F,
    const std::vector<std::pair<std::string, RMat>>& host,
    const std::vector<std::pair<std::string, RMat>>& extra_letters,
    const RMat& target, const std::string& hint_word,
    const ClosureResult* host_closure, bool projective, std::uint64_t seed,
    std::uint64_t search_steps, const detail::WalkTable* walk = nullptr) {
  if (!hint_word.empty()) {
    std::vector<std::pair<std::string, RMat>> dict = host;
    for (const auto& x : extra_letters) dict.push_back(x);
    try {
      RMat got = eval_rmat_word(F, dict, hint_word);
      bool ok = projective ? projective_normalize(F, got).e ==
                                 projective_normalize(F, target).e
                           : got.e == target.e;
      if (ok) return {"certified", hint_word};
    } catch (const std::invalid_argument&) {
      // hint references a letter that is not yet certified; fall through
    }
  }
  if (host_closure && host_closure->complete) {
    if (closure_contains(F, *host_closure, target)) return {"member", ""};
    return {"not-member", ""};
  }
  if (search_steps == 0) return {"undecided", ""};
  return detail::birthday_membership(F, host, target, projective, seed,
                                     search_steps, walk);
}

// ---------------------------------------------------------------------------
// subgroup comparison

struct SubgroupComparison {
  std::string verdict;  // "same" | "different" | "undecided"
  std::string detail;
  std::vector<std::string> certificates;  // "name = word" lines
};

// Do two generator sets generate the same subgroup?  When both closures are
// complete this is an exact element-set comparison.  Otherwise membership of
// every generator of each set in the other is certified by hint words or by
// the seeded search; a certified double inclusion still yields "same", a
// proven non-membership yields "different", anything else is "undecided".
inline SubgroupComparison same_subgroup(
    const ResidueField& F,
    const std::vector<std::pair<std::string, RMat>>& a,
    const std::vector<std::pair<std::string, RMat>>& b,
    const std::vector<MembershipHint>& hints_a_over_b = {},
    const std::vector<MembershipHint>& hints_b_over_a = {},
    std::uint64_t cap = 10000000, bool projective = false,
    std::uint64_t seed = 20260818, std::uint64_t search_steps = 3000000) {
  SubgroupComparison out;
  std::vector<RMat> ga, gb;
  for (const auto& [nm, g] : a) ga.push_back(g);
  for (const auto& [nm, g] : b) gb.push_back(g);
  ClosureResult ca = group_closure(F, ga, cap, projective);
  ClosureResult cb = group_closure(F, gb, cap, projective);

  if (ca.complete && cb.complete) {
    if (ca.order != cb.order) {
      out.verdict = "different";
      out.detail = "orders differ: " + ca.order.get_str() + " vs " +
                   cb.order.get_str();
      return out;
    }
    bool equal = ca.used_u64_keys == cb.used_u64_keys &&
                 (ca.used_u64_keys ? ca.keys64 == cb.keys64
                                   : ca.keys_str == cb.keys_str);
    out.verdict = equal ? "same" : "different";
    out.detail = equal ? "element sets agree (order " + ca.order.get_str() + ")"
                       : "equal orders but distinct element sets";
    return out;
  }

  // at least one closure capped: fall back to mutual membership
  auto one_direction =
      [&](const std::vector<std::pair<std::string, RMat>>& targets,
          const std::vector<std::pair<std::string, RMat>>& host,
          const std::vector<MembershipHint>& hints,
          const ClosureResult& host_cl, const char* dir) -> int {
    std::vector<std::pair<std::string, RMat>> proven;
    std::vector<bool> done(targets.size(), false);
    int certified = 0;
    bool different = false;
    // the forward half of the search depends only on the host generators, so
    // all walked targets in this direction share one table, built on demand
    std::optional<detail::WalkTable> table;
    auto walk_table = [&]() -> const detail::WalkTable* {
      if (!table && !targets.empty())
        table = detail::build_walk_table(F, host, targets.front().second.n,
                                         projective, seed, search_steps);
      return table ? &*table : nullptr;
    };
    // multi-pass so hints may reference earlier certified targets; a zero
    // search budget keeps the hint rounds cheap, and the walk is spent only
    // on targets whose hints stalled (or that never had one)
    auto sweep = [&](bool walk_unhinted, bool walk_all) {
      int rounds = static_cast<int>(targets.size()) + 1;
      for (int round = 0; round < rounds; ++round) {
        bool progress = false;
        for (std::size_t i = 0; i < targets.size(); ++i) {
          if (done[i]) continue;
          std::string hint;
          for (const auto& h : hints)
            if (h.target == targets[i].first) hint = h.word;
          bool walk = walk_all || (walk_unhinted && hint.empty());
          MembershipOutcome mo = certify_membership(
              F, host, proven, targets[i].second, hint,
              host_cl.complete ? &host_cl : nullptr, projective, seed,
              walk ? search_steps : 0,
              walk && !host_cl.complete ? walk_table() : nullptr);
          if (mo.status == "certified" || mo.status == "member") {
            done[i] = true;
            progress = true;
            ++certified;
            proven.emplace_back(targets[i].first, targets[i].second);
            if (!mo.word.empty())
              out.certificates.push_back(std::string(dir) + " " +
                                         targets[i].first + " = " + mo.word);
          } else if (mo.status == "not-member") {
            out.detail = std::string(dir) + " " + targets[i].first +
                         " is not in the other subgroup";
            different = true;
            return;
          }
        }
        if (!progress) break;
      }
    };
    sweep(false, false);  // hints and closure lookups only
    if (!different && certified < static_cast<int>(targets.size()))
      sweep(true, false);  // walk targets that never had a hint
    if (!different && certified < static_cast<int>(targets.size()))
      sweep(false, true);  // last resort: walk everything left
    if (different) return -1;
    return certified == static_cast<int>(targets.size()) ? 1 : 0;
  };

  int ab = one_direction(a, b, hints_a_over_b, cb, "a-in-b");
  if (ab < 0) {
    out.verdict = "different";
    return out;
  }
  int ba = one_direction(b, a, hints_b_over_a, ca, "b-in-a");
  if (ba < 0) {
    out.verdict = "different";
    return out;
  }
  if (ab == 1 && ba == 1) {
    out.verdict = "same";
    out.detail = "mutual membership certified";
  } else {
    out.verdict = "undecided";
    if (out.detail.empty())
      out.detail = "membership could not be certified within the budget";
  }
  return out;
}

// ---------------------------------------------------------------------------
// normality

struct NormalityReport {
  std::string verdict;  // "normal" | "not-normal" | "undecided"
  std::vector<std::string> failures;
};

// Is the subgroup generated by `sub` normalized by every generator in
// `ambient`?  Requires the subgroup closure to complete within the cap.
inline NormalityReport normality_check(
    const ResidueField& F,
    const std::vector<std::pair<std::string, RMat>>& ambient,
    const std::vector<std::pair<std::string, RMat>>& sub,
    std::uint64_t cap = 10000000, bool projective = false) {
  NormalityReport rep;
  std::vector<RMat> gs;
  for (const auto& [nm, g] : sub) gs.push_back(g);
  ClosureResult cl = group_closure(F, gs, cap, projective);
  if (!cl.complete) {
    rep.verdict = "undecided";
    rep.failures.push_back("subgroup closure exceeded the cap");
    return rep;
  }
  bool ok = true;
  for (const auto& [gn, g] : ambient) {
    RMat gi = rmat_inverse(F, g);
    for (const auto& [hn, h] : sub) {
      RMat conj = rmat_mul(F, rmat_mul(F, g, h), gi);
      if (!closure_contains(F, cl, conj)) {
        ok = false;
        rep.failures.push_back(gn + "*" + hn + "*" + gn + "^-1 escapes");
      }
    }
  }
  rep.verdict = ok ? "normal" : "not-normal";
  return rep;
}

// hint words for the worked point-push cell: one-holed torus with a second
// boundary, labels (2,4) at level 7.  Every twist generator is a word in the
// point-push images x, y, d except the two minus-side twists, which the
// search finds on its own; the reverse direction is fully explicit.
inline std::vector<MembershipHint> tht_curve_hints_over_pushes() {
  const std::string c = "x*y*x^-1*y^-1*d^-1";  // scalar commutator defect
  return {
      {"bd_i", c},
      {"bd_j", c + "*" + c + "*" + c},
      {"t_dsep", "d^-1*" + c + "*" + c + "*" + c},
      {"ty_plus", "y*ty_minus"},
      {"tx_plus", "x*tx_minus"},
  };
}

inline std::vector<MembershipHint> tht_push_hints_over_curves() {
  return {
      {"x", "tx_plus*tx_minus^-1"},
      {"y", "ty_plus*ty_minus^-1"},
      {"d", "bd_j*t_dsep^-1"},
  };
}

}  // namespace qblocks
