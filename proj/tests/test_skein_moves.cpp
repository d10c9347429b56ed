#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "qblocks/graphs.hpp"
#include "qblocks/matrix.hpp"
#include "qblocks/moves.hpp"
#include "qblocks/skein.hpp"

using qblocks::CycMatrix;
using qblocks::CycNum;
using qblocks::SkeinCtx;

TEST_CASE("quantum integers", "[skein]") {
  for (int p : {5, 7}) {
    for (int t = 1; t < p; ++t) {
      SkeinCtx cx(p, t);
      REQUIRE(cx.qint(0).is_zero());
      REQUIRE(cx.qint(1) == CycNum::one(p));
      // [m] = (A^{2m} - A^{-2m}) / (A^2 - A^{-2})
      for (int m = 2; m <= p; ++m)
        REQUIRE(cx.qint(m) * (cx.apow(2) - cx.apow(-2)) ==
                cx.apow(2L * m) - cx.apow(-2L * m));
      REQUIRE(cx.qfact(3) == cx.qint(1) * cx.qint(2) * cx.qint(3));
      // [p] = 0 at a level-p root
      REQUIRE(cx.qint(p).is_zero());
    }
  }
}

TEST_CASE("loop values", "[skein]") {
  for (int p : {5, 7, 11}) {
    SkeinCtx cx(p, 1);
    REQUIRE(cx.delta(0) == CycNum::one(p));
    // Chebyshev recursion delta(n+1) = delta(1) delta(n) - delta(n-1)
    for (int n = 1; n <= p - 3; ++n)
      REQUIRE(cx.delta(n + 1) == cx.delta(1) * cx.delta(n) - cx.delta(n - 1));
    // a 0-colored edge in a theta is removable
    for (int a : qblocks::colors(p)) REQUIRE(cx.theta(a, a, 0) == cx.delta(a));
  }
}

TEST_CASE("theta is symmetric in its colors", "[skein]") {
  SkeinCtx cx(7, 1);
  REQUIRE(cx.theta(2, 4, 2) == cx.theta(4, 2, 2));
  REQUIRE(cx.theta(2, 4, 2) == cx.theta(2, 2, 4));
  REQUIRE(cx.theta(2, 4, 4) == cx.theta(4, 4, 2));
  REQUIRE_THROWS_AS(cx.theta(2, 0, 4), std::invalid_argument);
}

TEST_CASE("half-twist eigenvalues", "[skein]") {
  SkeinCtx cx(7, 1);
  // lambda_c = (-1)^{(2a-c)/2} A^{(c(c+2) - 2a(a+2))/2} at a = 2
  REQUIRE(cx.braid_eigen(2, 4) == cx.apow(4));
  REQUIRE(cx.braid_eigen(2, 2) == -cx.apow(-4));
  REQUIRE(cx.braid_eigen(2, 0) == cx.apow(-8));
  // the two-strand ratio collapses to -A^{-2a^2}
  for (int p : {7, 11}) {
    SkeinCtx c2(p, 1);
    int a = 2;
    REQUIRE(c2.braid_eigen(a, 2 * a - 2) / c2.braid_eigen(a, 2 * a) ==
            -c2.apow(-2L * a * a));
  }
  // channels past the level cutoff are rejected as block labels
  SkeinCtx c5(5, 1);
  REQUIRE_THROWS_AS(c5.braid_eigen(2, 4), std::invalid_argument);
}

TEST_CASE("recoupling matrices are isometries", "[moves]") {
  for (int p : {5, 7}) {
    SkeinCtx cx(p, 1);
    int nonempty = 0;
    for (int a : qblocks::colors(p))
      for (int b : qblocks::colors(p))
        for (int c : qblocks::colors(p))
          for (int d : qblocks::colors(p)) {
            qblocks::FourPointSpace oldb = qblocks::fourpoint_basis(cx, a, b, c, d);
            qblocks::FourPointSpace newb = qblocks::fourpoint_basis(cx, b, c, d, a);
            if (oldb.channels.empty()) {
              REQUIRE(newb.channels.empty());
              continue;
            }
            ++nonempty;
            REQUIRE(oldb.channels.size() == newb.channels.size());
            CycMatrix F = qblocks::f_matrix(cx, a, b, c, d);
            CAPTURE(p, a, b, c, d);
            REQUIRE(qblocks::apply_form(F, newb.weights) ==
                    CycMatrix::diagonal(p, oldb.weights));
          }
    // number of nonempty four-point cells at this level
    REQUIRE(nonempty == (p == 5 ? 12 : 57));
  }
}

TEST_CASE("pentagon identity", "[moves]") {
  for (int p : {5, 7}) {
    SkeinCtx cx(p, 1);
    for (int a : qblocks::colors(p))
      for (int b : qblocks::colors(p))
        for (int c : qblocks::colors(p))
          for (int d : qblocks::colors(p))
            for (int total : qblocks::colors(p)) {
              CAPTURE(p, a, b, c, d, total);
              REQUIRE(qblocks::pentagon_check(cx, a, b, c, d, total));
            }
  }
}

TEST_CASE("marked torus block", "[moves]") {
  for (int p : {5, 7}) {
    SkeinCtx cx(p, 1);
    qblocks::TorusSpace sp = qblocks::torus_space(cx, 0);
    REQUIRE(static_cast<int>(sp.channels.size()) == (p - 1) / 2);
    // twist about the core is diagonal in the channel basis
    CycMatrix T = qblocks::torus_T(cx, 0);
    for (std::size_t k = 0; k < sp.channels.size(); ++k) {
      int j = sp.channels[k];
      REQUIRE(T.at(static_cast<int>(k), static_cast<int>(k)) ==
              cx.apow(static_cast<long>(j) * (j + 2)));
    }
  }
}

TEST_CASE("modular relation on the marked torus", "[moves]") {
  for (int p : {5, 7}) {
    for (int c : {0, 2}) {
      SkeinCtx cx(p, 1);
      qblocks::TorusS sm = qblocks::torus_S(cx, c);
      CycMatrix T = qblocks::torus_T(cx, c);
      CycMatrix ST = sm.S * T;
      CAPTURE(p, c);
      REQUIRE(ST * ST * ST == sm.S * sm.S);
      // the removed scalar is a unit of infinite multiplicative order
      REQUIRE_FALSE(qblocks::is_root_of_unity(sm.lambda_raw).is_root);
      // the normalized S-move preserves the Hermitian form
      qblocks::TorusSpace sp = qblocks::torus_space(cx, c);
      auto scal = qblocks::hermit_scalar(sm.S, sp.weights);
      REQUIRE(scal.has_value());
      REQUIRE(*scal == CycNum::one(p));
      // S^2 is central in the image: it commutes with the twist
      CycMatrix S2 = sm.S * sm.S;
      REQUIRE(S2 * T == T * S2);
    }
  }
}
