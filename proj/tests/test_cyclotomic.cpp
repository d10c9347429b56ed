#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>
#include <vector>

#include "qblocks/cyclotomic.hpp"

using qblocks::CycNum;

namespace {

CycNum random_cyc(int p, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 5);
  CycNum x = CycNum::zero(p);
  for (int k = 0; k < p - 1; ++k) {
    mpq_class q(num(rng), den(rng));
    q.canonicalize();
    x = x + q * CycNum::zeta_pow(p, k);
  }
  return x;
}

}  // namespace

TEST_CASE("power basis relations", "[cyclotomic]") {
  for (int p : {5, 7, 11}) {
    // zeta^p = 1
    REQUIRE(CycNum::zeta_pow(p, p) == CycNum::one(p));
    REQUIRE(CycNum::zeta(p).pow(p) == CycNum::one(p));
    // 1 + zeta + ... + zeta^{p-1} = 0
    CycNum s = CycNum::zero(p);
    for (int k = 0; k < p; ++k) s = s + CycNum::zeta_pow(p, k);
    REQUIRE(s.is_zero());
    // negative exponents wrap
    REQUIRE(CycNum::zeta_pow(p, -1) == CycNum::zeta_pow(p, p - 1));
  }
}

TEST_CASE("ring identities on random elements", "[cyclotomic]") {
  std::mt19937 rng(91u);
  for (int p : {5, 7}) {
    for (int trial = 0; trial < 40; ++trial) {
      CycNum a = random_cyc(p, rng), b = random_cyc(p, rng),
             c = random_cyc(p, rng);
      REQUIRE((a + b) * c == a * c + b * c);
      REQUIRE(a * b == b * a);
      REQUIRE((a - b) + b == a);
      if (!a.is_zero()) {
        REQUIRE(a * a.inv() == CycNum::one(p));
        REQUIRE((a * b).is_zero() == b.is_zero());
      }
    }
  }
}

TEST_CASE("division agrees with multiplication", "[cyclotomic]") {
  std::mt19937 rng(92u);
  for (int p : {5, 7}) {
    for (int trial = 0; trial < 20; ++trial) {
      CycNum a = random_cyc(p, rng);
      CycNum b = random_cyc(p, rng);
      if (b.is_zero()) continue;
      CycNum q = a / b;
      REQUIRE(q * b == a);
    }
  }
  REQUIRE_THROWS_AS(CycNum::one(5) / CycNum::zero(5), std::invalid_argument);
}

TEST_CASE("conjugation is the inverse-root automorphism", "[cyclotomic]") {
  std::mt19937 rng(93u);
  for (int p : {5, 7, 11}) {
    REQUIRE(CycNum::zeta(p).conj() == CycNum::zeta_pow(p, p - 1));
    for (int trial = 0; trial < 15; ++trial) {
      CycNum a = random_cyc(p, rng), b = random_cyc(p, rng);
      REQUIRE(a.conj().conj() == a);
      REQUIRE((a * b).conj() == a.conj() * b.conj());
      REQUIRE((a + b).conj() == a.conj() + b.conj());
      // a * conj(a) is fixed by conjugation (real)
      CycNum n = a * a.conj();
      REQUIRE(n.conj() == n);
    }
  }
}

TEST_CASE("galois action composes multiplicatively", "[cyclotomic]") {
  std::mt19937 rng(94u);
  for (int p : {5, 7}) {
    for (int u = 1; u < p; ++u)
      REQUIRE(CycNum::zeta(p).galois(u) == CycNum::zeta_pow(p, u));
    for (int trial = 0; trial < 10; ++trial) {
      CycNum a = random_cyc(p, rng);
      REQUIRE(a.galois(1) == a);
      for (int u = 2; u < p; ++u)
        for (int v = 2; v < p; ++v)
          REQUIRE(a.galois(u).galois(v) == a.galois((u * v) % p));
      // conj is the u = p-1 twist
      REQUIRE(a.conj() == a.galois(p - 1));
    }
  }
}

TEST_CASE("distinguished root A", "[cyclotomic]") {
  for (int p : {5, 7, 11, 13}) {
    for (int t = 1; t < p; ++t) {
      CycNum A = qblocks::root_at(p, t);
      REQUIRE(A * A == CycNum::zeta_pow(p, t));
      REQUIRE(A.pow(p) == -CycNum::one(p));
      REQUIRE(A.pow(2 * p) == CycNum::one(p));
      qblocks::RootOfUnityResult r = qblocks::is_root_of_unity(A);
      REQUIRE(r.is_root);
      REQUIRE(r.order == 2 * p);
    }
  }
}

TEST_CASE("root of unity detection matches brute force", "[cyclotomic]") {
  std::mt19937 rng(95u);
  for (int p : {5, 7, 11}) {
    // every +-zeta^k is detected with the right order
    for (int k = 0; k < p; ++k) {
      for (int sign : {+1, -1}) {
        CycNum x = CycNum::zeta_pow(p, k);
        if (sign < 0) x = -x;
        qblocks::RootOfUnityResult r = qblocks::is_root_of_unity(x);
        REQUIRE(r.is_root);
        long expect;
        if (sign > 0)
          expect = k == 0 ? 1 : p;
        else
          expect = k == 0 ? 2 : 2 * p;
        REQUIRE(r.order == expect);
        REQUIRE(x.pow(r.order) == CycNum::one(p));
      }
    }
    // random elements that are not one of the +-zeta^k are rejected
    int rejected = 0;
    while (rejected < 100) {
      CycNum x = random_cyc(p, rng);
      if (x.is_zero()) continue;
      bool unit = false;
      for (int k = 0; k < p && !unit; ++k)
        unit = x == CycNum::zeta_pow(p, k) || x == -CycNum::zeta_pow(p, k);
      if (unit) continue;
      REQUIRE_FALSE(qblocks::is_root_of_unity(x).is_root);
      ++rejected;
    }
    REQUIRE_THROWS_AS(qblocks::is_root_of_unity(CycNum::zero(p)),
                      std::invalid_argument);
  }
}

TEST_CASE("rational detection", "[cyclotomic]") {
  CycNum x = CycNum::from_rational(7, mpq_class(-3, 4));
  REQUIRE(x.is_rational());
  REQUIRE(x.rational_value() == mpq_class(-3, 4));
  REQUIRE_FALSE(CycNum::zeta(7).is_rational());
  REQUIRE(CycNum::from_int(5, 12) == mpq_class(12) * CycNum::one(5));
}

TEST_CASE("serialization round-trips byte for byte", "[cyclotomic]") {
  std::mt19937 rng(96u);
  for (int p : {5, 7, 11}) {
    for (int trial = 0; trial < 30; ++trial) {
      CycNum x = random_cyc(p, rng);
      std::string s = x.serialize();
      CycNum y = CycNum::parse(s);
      REQUIRE(y == x);
      REQUIRE(y.serialize() == s);
    }
    REQUIRE(CycNum::parse(CycNum::zero(p).serialize()) == CycNum::zero(p));
  }
}

TEST_CASE("parse failures carry byte offsets", "[cyclotomic]") {
  using qblocks::parse_error;

  auto offset_of = [](const std::string& s) -> std::size_t {
    try {
      CycNum::parse(s);
    } catch (const parse_error& e) {
      return e.offset;
    }
    FAIL("expected a parse error for: " + s);
    return static_cast<std::size_t>(-1);
  };

  // wrong magic at the start
  REQUIRE(offset_of("q:5;coeffs:0,0,0,0") == 0);
  // non-prime level
  REQUIRE_THROWS_AS(CycNum::parse("p:6;coeffs:0,0,0,0,0"), std::exception);
  // wrong coefficient count
  REQUIRE_THROWS_AS(CycNum::parse("p:5;coeffs:0,0,0"), parse_error);
  // junk inside a coefficient: the offset points into the list
  std::string good = CycNum::zeta(5).serialize();
  std::string bad = good;
  bad[bad.find("0/1") != std::string::npos ? bad.find('0') : 0] = 'x';
  std::size_t off = offset_of(bad);
  REQUIRE(off > 0);
  REQUIRE(off < bad.size());
  // fractions must arrive in lowest terms
  REQUIRE_THROWS_AS(CycNum::parse("p:5;coeffs:2/4,0/1,0/1,0/1"), parse_error);
  // base offset shifts reported positions
  try {
    CycNum::parse("p:5;coeffs:0,0,0", 100);
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    REQUIRE(e.offset >= 100);
  }
}
