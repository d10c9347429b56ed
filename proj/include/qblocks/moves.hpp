#pragma once

// Basis-change moves between fusion trees: the F-move (recoupling) with its
// exact coefficient, the four-point spaces it acts on, the torus S and T
// matrices with the modular normalization, and the pentagon identity check.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qblocks/matrix.hpp"
#include "qblocks/skein.hpp"

namespace qblocks {

// coefficient of the recoupling move taking the coupling
// (a,b->j), (j,c..d side) to channel n; old vertex triples (a,b,j),(c,d,j),
// new triples (b,c,n),(d,a,n)
inline CycNum f_coeff(const SkeinCtx& cx, int a, int b, int c, int d, int j,
                      int n) {
  const int p = cx.p();
  if (!admissible(p, a, b, j) || !admissible(p, c, d, j) ||
      !admissible(p, b, c, n) || !admissible(p, d, a, n))
    throw std::invalid_argument("f_coeff labels not admissible");
  return cx.delta(n) * cx.tet(a, b, j, c, d, n) /
         (cx.theta(b, c, n) * cx.theta(d, a, n));
}

// four-point block: channels j with (a,b,j) and (c,d,j) admissible, with the
// diagonal Hermitian form theta(a,b,j) theta(c,d,j) / delta(j)
struct FourPointSpace {
  int a, b, c, d;
  std::vector<int> channels;
  std::vector<CycNum> weights;
};

inline FourPointSpace fourpoint_basis(const SkeinCtx& cx, int a, int b, int c,
                                      int d) {
  const int p = cx.p();
  check_color(p, a);
  check_color(p, b);
  check_color(p, c);
  check_color(p, d);
  FourPointSpace sp{a, b, c, d, {}, {}};
  for (int j : colors(p)) {
    if (!adm_fast(p, a, b, j) || !adm_fast(p, c, d, j)) continue;
    sp.channels.push_back(j);
    sp.weights.push_back(cx.theta(a, b, j) * cx.theta(c, d, j) / cx.delta(j));
  }
  return sp;
}

// matrix of the F-move from the channels of (a,b,c,d) to those of (b,c,d,a);
// row = new channel, column = old channel
inline CycMatrix f_matrix(const SkeinCtx& cx, int a, int b, int c, int d) {
  FourPointSpace oldb = fourpoint_basis(cx, a, b, c, d);
  FourPointSpace newb = fourpoint_basis(cx, b, c, d, a);
  CycMatrix F(cx.p(), static_cast<int>(newb.channels.size()),
              static_cast<int>(oldb.channels.size()));
  for (std::size_t r = 0; r < newb.channels.size(); ++r)
    for (std::size_t col = 0; col < oldb.channels.size(); ++col)
      F.at(static_cast<int>(r), static_cast<int>(col)) =
          f_coeff(cx, a, b, c, d, oldb.channels[col], newb.channels[r]);
  return F;
}

// once-marked torus block with marking color c: channels j with (j,j,c)
// admissible, form theta(j,j,c)/delta(j)
struct TorusSpace {
  int c;
  std::vector<int> channels;
  std::vector<CycNum> weights;
};

inline TorusSpace torus_space(const SkeinCtx& cx, int c) {
  const int p = cx.p();
  check_color(p, c);
  TorusSpace sp{c, {}, {}};
  for (int j : colors(p)) {
    if (!adm_fast(p, j, j, c)) continue;
    sp.channels.push_back(j);
    sp.weights.push_back(cx.theta(j, j, c) / cx.delta(j));
  }
  return sp;
}

// twist about the core curve: diagonal with entries A^{j(j+2)}
inline CycMatrix torus_T(const SkeinCtx& cx, int c) {
  TorusSpace sp = torus_space(cx, c);
  std::vector<CycNum> d;
  for (int j : sp.channels)
    d.push_back(cx.apow(static_cast<long>(j) * (j + 2)));
  return CycMatrix::diagonal(cx.p(), d);
}

// unnormalized S-move on the marked torus
inline CycMatrix torus_S_raw(const SkeinCtx& cx, int c) {
  TorusSpace sp = torus_space(cx, c);
  const int p = cx.p();
  const int n = static_cast<int>(sp.channels.size());
  CycMatrix S(p, n, n);
  for (int col = 0; col < n; ++col) {
    const int i = sp.channels[static_cast<std::size_t>(col)];
    for (int row = 0; row < n; ++row) {
      const int j = sp.channels[static_cast<std::size_t>(row)];
      CycNum sum = CycNum::zero(p);
      for (int m : colors(p)) {
        if (!adm_fast(p, i, j, m)) continue;
        sum = sum + cx.delta(m) * cx.tet(i, j, m, j, i, c) *
                        cx.apow(static_cast<long>(m) * (m + 2) -
                                static_cast<long>(i) * (i + 2) -
                                static_cast<long>(j) * (j + 2)) /
                        cx.theta(i, j, m);
      }
      S.at(row, col) = sum * cx.delta(j) / cx.theta(j, j, c);
    }
  }
  return S;
}

struct TorusS {
  CycMatrix S;        // normalized: (S T)^3 = S^2 exactly
  CycNum lambda_raw;  // scalar removed from the raw S-move
};

inline TorusS torus_S(const SkeinCtx& cx, int c) {
  CycMatrix Sraw = torus_S_raw(cx, c);
  CycMatrix T = torus_T(cx, c);
  CycMatrix ST = Sraw * T;
  auto lam = scalar_ratio(ST * ST * ST, Sraw * Sraw);
  if (!lam || lam->is_zero())
    throw std::runtime_error("torus S-move normalization failed");
  return TorusS{lam->inv() * Sraw, *lam};
}

// ---------------------------------------------------------------------------
// pentagon identity on five-point trees
// ---------------------------------------------------------------------------

namespace detail {

// channel pairs of the five bracketings of (a b c d) -> total
inline std::vector<std::pair<int, int>> tree_channels(int p, int shape, int a,
                                                      int b, int c, int d,
                                                      int total) {
  std::vector<std::pair<int, int>> out;
  for (int x : colors(p))
    for (int y : colors(p)) {
      bool ok = false;
      switch (shape) {
        case 1:  // ((ab)c)d, channels (j,k)
          ok = adm_fast(p, a, b, x) && adm_fast(p, x, c, y) &&
               adm_fast(p, y, d, total);
          break;
        case 2:  // (a(bc))d, channels (e,k)
          ok = adm_fast(p, b, c, x) && adm_fast(p, a, x, y) &&
               adm_fast(p, y, d, total);
          break;
        case 3:  // a((bc)d), channels (e,f)
          ok = adm_fast(p, b, c, x) && adm_fast(p, x, d, y) &&
               adm_fast(p, a, y, total);
          break;
        case 4:  // a(b(cd)), channels (g,f)
          ok = adm_fast(p, c, d, x) && adm_fast(p, b, x, y) &&
               adm_fast(p, a, y, total);
          break;
        case 5:  // (ab)(cd), channels (j,g)
          ok = adm_fast(p, a, b, x) && adm_fast(p, c, d, y) &&
               adm_fast(p, x, y, total);
          break;
        default:
          throw std::logic_error("bad tree shape");
      }
      if (ok) out.emplace_back(x, y);
    }
  return out;
}

inline int index_of(const std::vector<std::pair<int, int>>& basis,
                    std::pair<int, int> key) {
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i] == key) return static_cast<int>(i);
  return -1;
}

}  // namespace detail

// The two recoupling paths between the left-comb and right-comb bracketings
// of four strands agree exactly.  Returns true when both paths produce the
// same matrix (and the bases have the same size along the way).
inline bool pentagon_check(const SkeinCtx& cx, int a, int b, int c, int d,
                           int total) {
  const int p = cx.p();
  using detail::index_of;
  using detail::tree_channels;
  auto t1 = tree_channels(p, 1, a, b, c, d, total);
  auto t2 = tree_channels(p, 2, a, b, c, d, total);
  auto t3 = tree_channels(p, 3, a, b, c, d, total);
  auto t4 = tree_channels(p, 4, a, b, c, d, total);
  auto t5 = tree_channels(p, 5, a, b, c, d, total);
  if (t1.empty()) return true;  // no states: identity holds vacuously

  CycMatrix M12(p, static_cast<int>(t2.size()), static_cast<int>(t1.size()));
  for (std::size_t col = 0; col < t1.size(); ++col) {
    auto [j, k] = t1[col];
    for (int e : colors(p)) {
      if (!adm_fast(p, b, c, e) || !adm_fast(p, a, e, k)) continue;
      int r = index_of(t2, {e, k});
      if (r < 0) continue;
      M12.at(r, static_cast<int>(col)) = f_coeff(cx, a, b, c, k, j, e);
    }
  }
  CycMatrix M23(p, static_cast<int>(t3.size()), static_cast<int>(t2.size()));
  for (std::size_t col = 0; col < t2.size(); ++col) {
    auto [e, k] = t2[col];
    for (int f : colors(p)) {
      if (!adm_fast(p, e, d, f) || !adm_fast(p, a, f, total)) continue;
      int r = index_of(t3, {e, f});
      if (r < 0) continue;
      M23.at(r, static_cast<int>(col)) = f_coeff(cx, a, e, d, total, k, f);
    }
  }
  CycMatrix M34(p, static_cast<int>(t4.size()), static_cast<int>(t3.size()));
  for (std::size_t col = 0; col < t3.size(); ++col) {
    auto [e, f] = t3[col];
    for (int g : colors(p)) {
      if (!adm_fast(p, c, d, g) || !adm_fast(p, b, g, f)) continue;
      int r = index_of(t4, {g, f});
      if (r < 0) continue;
      M34.at(r, static_cast<int>(col)) = f_coeff(cx, b, c, d, f, e, g);
    }
  }
  CycMatrix M15(p, static_cast<int>(t5.size()), static_cast<int>(t1.size()));
  for (std::size_t col = 0; col < t1.size(); ++col) {
    auto [j, k] = t1[col];
    for (int g : colors(p)) {
      if (!adm_fast(p, c, d, g) || !adm_fast(p, j, g, total)) continue;
      int r = index_of(t5, {j, g});
      if (r < 0) continue;
      M15.at(r, static_cast<int>(col)) = f_coeff(cx, j, c, d, total, k, g);
    }
  }
  CycMatrix M54(p, static_cast<int>(t4.size()), static_cast<int>(t5.size()));
  for (std::size_t col = 0; col < t5.size(); ++col) {
    auto [j, g] = t5[col];
    for (int f : colors(p)) {
      if (!adm_fast(p, b, g, f) || !adm_fast(p, a, f, total)) continue;
      int r = index_of(t4, {g, f});
      if (r < 0) continue;
      M54.at(r, static_cast<int>(col)) = f_coeff(cx, a, b, g, total, j, f);
    }
  }
  return M34 * (M23 * M12) == M54 * M15;
}

}  // namespace qblocks
