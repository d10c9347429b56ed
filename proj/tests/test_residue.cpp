#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "qblocks/cyclotomic.hpp"
#include "qblocks/residue.hpp"

using qblocks::CycNum;
using qblocks::ResidueField;
using qblocks::fq::Poly;

namespace {

CycNum random_cyc(int p, std::mt19937& rng) {
  std::uniform_int_distribution<int> num(-9, 9);
  CycNum x = CycNum::zero(p);
  for (int k = 0; k < p - 1; ++k)
    x = x + mpq_class(num(rng)) * CycNum::zeta_pow(p, k);
  return x;
}

// multiply two polynomials over F_q (schoolbook, small inputs)
Poly poly_mul_mod(const Poly& a, const Poly& b, long q) {
  Poly c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      c[i + j] = (c[i + j] + a[i] * b[j]) % q;
  return c;
}

}  // namespace

TEST_CASE("multiplicative order of q modulo p", "[residue]") {
  REQUIRE(qblocks::residue_degree(29, 7) == 1);
  REQUIRE(qblocks::residue_degree(43, 7) == 1);
  REQUIRE(qblocks::residue_degree(13, 7) == 2);
  REQUIRE(qblocks::residue_degree(2, 7) == 3);
  REQUIRE(qblocks::residue_degree(3, 7) == 6);
  REQUIRE(qblocks::residue_degree(11, 5) == 1);
  REQUIRE(qblocks::residue_degree(31, 5) == 1);
  REQUIRE(qblocks::residue_degree(19, 5) == 2);
  REQUIRE(qblocks::residue_degree(2, 5) == 4);
  REQUIRE(qblocks::residue_degree(3, 5) == 4);
  REQUIRE_THROWS_AS(qblocks::residue_degree(7, 7), std::invalid_argument);
}

TEST_CASE("cyclotomic factor tables", "[residue]") {
  using Factors = std::vector<Poly>;
  REQUIRE(qblocks::phi_factors(7, 29) ==
          Factors{{4, 1}, {5, 1}, {6, 1}, {9, 1}, {13, 1}, {22, 1}});
  REQUIRE(qblocks::phi_factors(7, 43) ==
          Factors{{2, 1}, {8, 1}, {22, 1}, {27, 1}, {32, 1}, {39, 1}});
  REQUIRE(qblocks::phi_factors(7, 13) ==
          Factors{{1, 3, 1}, {1, 5, 1}, {1, 6, 1}});
  REQUIRE(qblocks::phi_factors(7, 2) == Factors{{1, 0, 1, 1}, {1, 1, 0, 1}});
  REQUIRE(qblocks::phi_factors(7, 3) == Factors{{1, 1, 1, 1, 1, 1, 1}});
  REQUIRE(qblocks::phi_factors(5, 11) == Factors{{2, 1}, {6, 1}, {7, 1}, {8, 1}});
  REQUIRE(qblocks::phi_factors(5, 31) ==
          Factors{{15, 1}, {23, 1}, {27, 1}, {29, 1}});
  REQUIRE(qblocks::phi_factors(5, 19) == Factors{{1, 5, 1}, {1, 15, 1}});
  REQUIRE(qblocks::phi_factors(5, 2) == Factors{{1, 1, 1, 1, 1}});
  REQUIRE(qblocks::phi_factors(5, 3) == Factors{{1, 1, 1, 1, 1}});
}

TEST_CASE("the factors multiply back to the cyclotomic polynomial",
          "[residue]") {
  for (int p : {5, 7, 11}) {
    for (long q : {2L, 3L, 13L, 29L, 43L}) {
      if (q == static_cast<long>(p)) continue;
      std::vector<Poly> fs = qblocks::phi_factors(p, q);
      Poly prod{1};
      for (const Poly& f : fs) prod = poly_mul_mod(prod, f, q);
      Poly phi(static_cast<std::size_t>(p), 1);  // 1 + x + ... + x^{p-1}
      CAPTURE(p, q);
      REQUIRE(prod == phi);
      // each factor has the residue degree, and they partition deg p-1
      int f_deg = qblocks::residue_degree(q, p);
      for (const Poly& f : fs)
        REQUIRE(static_cast<int>(f.size()) - 1 == f_deg);
      REQUIRE(static_cast<int>(fs.size()) * f_deg == p - 1);
    }
  }
}

TEST_CASE("splitting data picks the sorted factor list", "[residue]") {
  qblocks::SplittingData sd = qblocks::splitting_data(29, 7);
  REQUIRE(sd.q == 29);
  REQUIRE(sd.p == 7);
  REQUIRE(sd.f == 1);
  REQUIRE(sd.moduli.size() == 6);
  REQUIRE(sd.moduli[0] == Poly{4, 1});
}

TEST_CASE("residue field arithmetic", "[residue]") {
  // prime field through a linear modulus: alpha = -4 = 25 is a 7th root
  ResidueField F(29, 7, {4, 1});
  REQUIRE(F.f() == 1);
  REQUIRE(F.size() == 29);
  ResidueField::Elt a = F.alpha();
  REQUIRE(a == F.from_int(25));
  REQUIRE(F.pow(a, 7) == F.one());
  REQUIRE(F.elt_order(a) == 7);
  REQUIRE(F.mul(a, F.inv(a)) == F.one());
  REQUIRE(F.add(F.from_int(15), F.from_int(20)) == F.from_int(6));
  REQUIRE(F.sub(F.zero(), F.one()) == F.from_int(28));

  // quadratic extension: F_13[x]/(1 + 3x + x^2)
  ResidueField G(13, 7, {1, 3, 1});
  REQUIRE(G.f() == 2);
  REQUIRE(G.size() == 169);
  ResidueField::Elt b = G.alpha();
  REQUIRE(G.pow(b, 7) == G.one());
  REQUIRE(G.elt_order(b) == 7);
  // Frobenius is the q-power map, so it inverts a 7th root when q = 13 = -1
  // mod 7
  REQUIRE(G.frobenius(b) == G.inv(b));
  REQUIRE(G.frobenius(G.frobenius(b)) == b);
  // field ops satisfy the distributive law on random elements
  std::mt19937 rng(7u);
  std::uniform_int_distribution<long> pick(0, 12);
  for (int trial = 0; trial < 50; ++trial) {
    ResidueField::Elt x{pick(rng), pick(rng)}, y{pick(rng), pick(rng)},
        z{pick(rng), pick(rng)};
    REQUIRE(G.mul(G.add(x, y), z) == G.add(G.mul(x, z), G.mul(y, z)));
    if (x != G.zero()) REQUIRE(G.mul(x, G.inv(x)) == G.one());
  }
}

TEST_CASE("reduction is a ring homomorphism", "[residue]") {
  std::mt19937 rng(8u);
  struct CellSpec {
    long q;
    int p;
    Poly mod;
  };
  for (const CellSpec& cell : {CellSpec{29, 7, {4, 1}},
                               CellSpec{13, 7, {1, 3, 1}},
                               CellSpec{11, 5, {2, 1}}}) {
    ResidueField F(cell.q, cell.p, cell.mod);
    REQUIRE(qblocks::reduce_mod(CycNum::one(cell.p), F) == F.one());
    REQUIRE(qblocks::reduce_mod(CycNum::zeta(cell.p), F) == F.alpha());
    for (int trial = 0; trial < 200; ++trial) {
      CycNum x = random_cyc(cell.p, rng), y = random_cyc(cell.p, rng);
      REQUIRE(qblocks::reduce_mod(x + y, F) ==
              F.add(qblocks::reduce_mod(x, F), qblocks::reduce_mod(y, F)));
      REQUIRE(qblocks::reduce_mod(x * y, F) ==
              F.mul(qblocks::reduce_mod(x, F), qblocks::reduce_mod(y, F)));
    }
  }
}

TEST_CASE("denominators at the residue characteristic are rejected",
          "[residue]") {
  ResidueField F(29, 7, {4, 1});
  CycNum bad = CycNum::from_rational(7, mpq_class(1, 29));
  REQUIRE_THROWS_AS(qblocks::reduce_mod(bad, F), qblocks::bad_prime_error);
  try {
    qblocks::reduce_mod(bad, F);
  } catch (const qblocks::bad_prime_error& e) {
    REQUIRE_FALSE(e.entry.empty());
  }
  // numerators divisible by q are fine
  CycNum ok = CycNum::from_rational(7, mpq_class(29, 3));
  REQUIRE_NOTHROW(qblocks::reduce_mod(ok, F));
  // a denominator of 58 = 2 * 29 is still bad
  CycNum bad2 = mpq_class(1, 58) * CycNum::zeta(7);
  REQUIRE_THROWS_AS(qblocks::reduce_mod(bad2, F), qblocks::bad_prime_error);
}

TEST_CASE("conjugation reduces to the half-power Frobenius", "[residue]") {
  std::mt19937 rng(9u);
  // f = 2 cells: conj matches one Frobenius application
  for (auto [q, p, mod] : {std::tuple<long, int, Poly>{13, 7, {1, 3, 1}},
                           std::tuple<long, int, Poly>{19, 5, {1, 5, 1}}}) {
    ResidueField F(q, p, mod);
    REQUIRE(F.f() == 2);
    for (int trial = 0; trial < 100; ++trial) {
      CycNum x = random_cyc(p, rng);
      REQUIRE(qblocks::reduce_mod(x.conj(), F) ==
              F.frobenius(qblocks::reduce_mod(x, F)));
    }
  }
  // f = 6: conj is Frobenius applied three times
  ResidueField H(3, 7, {1, 1, 1, 1, 1, 1, 1});
  for (int trial = 0; trial < 30; ++trial) {
    CycNum x = random_cyc(7, rng);
    ResidueField::Elt r = qblocks::reduce_mod(x, H);
    REQUIRE(qblocks::reduce_mod(x.conj(), H) ==
            H.frobenius(H.frobenius(H.frobenius(r))));
  }
}

TEST_CASE("element serialization", "[residue]") {
  ResidueField G(13, 7, {1, 3, 1});
  std::string s = G.serialize(G.alpha());
  REQUIRE(s.find("q:13") != std::string::npos);
  REQUIRE(s.find("f:2") != std::string::npos);
  REQUIRE(s.find("mod:1,3,1") != std::string::npos);
}

TEST_CASE("ramified and invalid parameters are rejected", "[residue]") {
  REQUIRE_THROWS_AS(qblocks::splitting_data(7, 7), std::invalid_argument);
  REQUIRE_THROWS_AS(qblocks::phi_factors(7, 4), std::invalid_argument);
}
