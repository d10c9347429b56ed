#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "qblocks/dims.hpp"
#include "qblocks/graphs.hpp"

using qblocks::DimEngine;

namespace {

struct Cell {
  int p, g;
  std::vector<int> labels;
  long dim;
};

// hand-checked dimension grid: p in {5,7,11,13}, genus 1..4, up to two
// marked points drawn from {2, p-3}
const std::vector<Cell> kGrid = {
    {5, 1, {}, 2},        {5, 1, {2}, 1},        {5, 1, {2, 2}, 3},
    {5, 2, {}, 5},        {5, 2, {2}, 5},        {5, 2, {2, 2}, 10},
    {5, 3, {}, 15},       {5, 3, {2}, 20},       {5, 3, {2, 2}, 35},
    {5, 4, {}, 50},       {5, 4, {2}, 75},       {5, 4, {2, 2}, 125},
    {7, 1, {}, 3},        {7, 1, {2}, 2},        {7, 1, {4}, 1},
    {7, 1, {2, 4}, 3},    {7, 1, {2, 2}, 6},     {7, 2, {}, 14},
    {7, 2, {2}, 21},      {7, 2, {4}, 14},       {7, 2, {2, 4}, 35},
    {7, 2, {2, 2}, 49},   {7, 3, {}, 98},        {7, 3, {2}, 196},
    {7, 3, {4}, 147},     {7, 3, {2, 4}, 343},   {7, 3, {2, 2}, 441},
    {7, 4, {}, 833},      {7, 4, {2}, 1813},     {7, 4, {4}, 1421},
    {7, 4, {2, 4}, 3234}, {7, 4, {2, 2}, 4067},  {11, 1, {}, 5},
    {11, 1, {2}, 4},      {11, 1, {8}, 1},       {11, 1, {2, 8}, 3},
    {11, 1, {2, 2}, 12},  {11, 2, {}, 55},       {11, 2, {2}, 110},
    {11, 2, {8}, 55},     {11, 2, {2, 8}, 154},  {11, 2, {2, 2}, 286},
    {11, 3, {}, 1331},    {11, 3, {2}, 3388},    {11, 3, {8}, 2178},
    {11, 3, {2, 8}, 5929},{11, 3, {2, 2}, 8954}, {11, 4, {}, 42592},
    {11, 4, {2}, 113135}, {11, 4, {8}, 78529},   {11, 4, {2, 8}, 211629},
    {11, 4, {2, 2}, 302137},
    {13, 1, {}, 6},       {13, 1, {2}, 5},       {13, 1, {10}, 1},
    {13, 1, {2, 10}, 3},  {13, 1, {2, 2}, 15},   {13, 2, {}, 91},
    {13, 2, {2}, 195},    {13, 2, {10}, 91},     {13, 2, {2, 10}, 260},
    {13, 2, {2, 2}, 520}, {13, 3, {}, 3549},     {13, 3, {2}, 9464},
    {13, 3, {10}, 5915},  {13, 3, {2, 10}, 16562},
    {13, 3, {2, 2}, 25857},
    {13, 4, {}, 186745},  {13, 4, {2}, 514098},  {13, 4, {10}, 349323},
    {13, 4, {2, 10}, 971074},
    {13, 4, {2, 2}, 1419262},
};

}  // namespace

TEST_CASE("recursion hits the reference grid", "[dims]") {
  int last_p = 0;
  DimEngine* eng = nullptr;
  std::vector<DimEngine> keep;
  keep.reserve(4);
  for (const Cell& c : kGrid) {
    if (c.p != last_p) {
      keep.emplace_back(c.p);
      eng = &keep.back();
      last_p = c.p;
    }
    CAPTURE(c.p, c.g, c.labels);
    REQUIRE(eng->dim(c.g, c.labels) == c.dim);
  }
}

TEST_CASE("intermediate one-point values", "[dims]") {
  DimEngine e7(7);
  REQUIRE(e7.W(2, 0) == 14);
  REQUIRE(e7.W(2, 2) == 21);
  REQUIRE(e7.W(2, 4) == 14);
  REQUIRE(e7.W(3, 0) == 98);
  DimEngine e5(5);
  REQUIRE(e5.W(2, 0) == 5);
  REQUIRE(e5.W(2, 2) == 5);
  REQUIRE(e5.W(3, 0) == 15);
  REQUIRE(e5.W(4, 0) == 50);
}

TEST_CASE("enumeration agrees with recursion on a sample", "[dims]") {
  for (int p : {5, 7}) {
    DimEngine eng(p);
    for (int g : {1, 2, 3}) {
      for (const std::vector<int>& labels :
           {std::vector<int>{}, {2}, {2, p - 3}, {2, 2}}) {
        CAPTURE(p, g, labels);
        mpz_class by_count =
            qblocks::count_colorings(p, qblocks::standard_graph(g, labels));
        REQUIRE(by_count == eng.dim(g, labels));
      }
    }
  }
}

TEST_CASE("enumeration lists are lexicographic and duplicate-free", "[dims]") {
  qblocks::ColoredGraph G = qblocks::standard_graph(2, {2});
  std::vector<qblocks::Coloring> all = qblocks::enumerate_colorings(7, G);
  REQUIRE(all.size() == 21);
  for (std::size_t i = 1; i < all.size(); ++i) REQUIRE(all[i - 1] < all[i]);
}

TEST_CASE("character sum agrees with recursion", "[dims]") {
  for (int p : {5, 7, 11}) {
    DimEngine eng(p);
    for (int g : {1, 2, 3}) {
      for (const std::vector<int>& labels :
           {std::vector<int>{}, {2}, {p - 3}, {2, p - 3}}) {
        CAPTURE(p, g, labels);
        REQUIRE(qblocks::verlinde_dim(p, g, labels) == eng.dim(g, labels));
      }
    }
  }
}

TEST_CASE("closed forms", "[dims]") {
  for (int p : {5, 7, 11, 13}) {
    DimEngine eng(p);
    REQUIRE(qblocks::genus2_top_closed(p) == eng.dim(2, {p - 3}));
    REQUIRE(qblocks::genus3_top_closed(p) == eng.dim(3, {p - 3}));
    for (int i : qblocks::colors(p))
      for (int j : qblocks::colors(p))
        REQUIRE(qblocks::genus1_dim(p, i, j) == eng.dim(1, {i, j}));
  }
  REQUIRE(qblocks::dim_closed_form(7, 2, {4}) == 14);
  REQUIRE(qblocks::dim_closed_form(7, 3, {4}) == 147);
  REQUIRE(qblocks::dim_closed_form(7, 1, {2, 4}) == 3);
  REQUIRE_THROWS_AS(qblocks::dim_closed_form(7, 2, {2}),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(qblocks::dim_closed_form(7, 4, {4}),
                    std::invalid_argument);
}

TEST_CASE("a 0-colored point is removable", "[dims]") {
  DimEngine eng(7);
  for (int g : {1, 2, 3}) {
    REQUIRE(eng.dim(g, {0}) == eng.dim(g, {}));
    for (int k : qblocks::colors(7))
      REQUIRE(eng.dim(g, {k, 0}) == eng.dim(g, {k}));
  }
}

TEST_CASE("two-point spaces fuse through one-point spaces", "[dims]") {
  for (int p : {5, 7, 11}) {
    DimEngine eng(p);
    for (int i : {2, p - 3}) {
      for (int j : {2, p - 3}) {
        mpz_class lhs = eng.dim(2, {i, j});
        mpz_class rhs = 0;
        for (int m : qblocks::colors(p))
          if (qblocks::admissible(p, i, j, m)) rhs += eng.dim(2, {m});
        REQUIRE(lhs == rhs);
      }
    }
  }
}

TEST_CASE("top-label comparison", "[dims][lemma]") {
  for (int p : {5, 7, 11, 13, 19}) {
    for (int g : {2, 3, 4}) {
      qblocks::CompareReport r = qblocks::check_compare(g, p);
      CAPTURE(p, g, r.top.get_str(), r.plain.get_str());
      REQUIRE(r.ok);
      REQUIRE(r.strict == (g >= 3));
      if (g == 2) REQUIRE(r.top == r.plain);
    }
  }
  REQUIRE_THROWS_AS(qblocks::check_compare(1, 7), std::invalid_argument);
}

TEST_CASE("top-label growth", "[dims][lemma]") {
  for (int p : {5, 7, 11, 13, 19}) {
    for (int g : {2, 3, 4}) {
      qblocks::GrowthReport r = qblocks::check_growth(g, p);
      CAPTURE(p, g, r.next.get_str(), r.bound.get_str());
      REQUIRE(r.ok);
      REQUIRE(r.binomial == (g >= 3));
    }
  }
  // reference cell: genus 3 at p = 7 compares 1421 against C(147,2)
  qblocks::GrowthReport r = qblocks::check_growth(3, 7);
  REQUIRE(r.next == 1421);
  REQUIRE(r.bound == 147 * 146 / 2);
  // the genus-2 ratio converges toward 0.7 from below
  qblocks::GrowthReport r2 = qblocks::check_growth(2, 997);
  REQUIRE(r2.ratio > 0.65);
  REQUIRE(r2.ratio < 0.71);
}

TEST_CASE("square scan", "[dims]") {
  // 1 + 8 dim values at the first levels
  REQUIRE(1 + 8 * qblocks::genus3_top_closed(5) == 161);
  REQUIRE(1 + 8 * qblocks::genus3_top_closed(7) == 1177);
  REQUIRE(1 + 8 * qblocks::genus3_top_closed(11) == 17425);
  REQUIRE(1 + 8 * qblocks::genus3_top_closed(13) == 47321);

  qblocks::ScanResult res = qblocks::square_scan(1000);
  REQUIRE(res.offenders.empty());
  REQUIRE(res.primes_scanned == 166);  // primes in [5, 1000]
  REQUIRE(res.cross_checked > 0);
  REQUIRE_THROWS_AS(qblocks::square_scan(3), std::invalid_argument);
}

TEST_CASE("primality helper", "[dims]") {
  REQUIRE(qblocks::is_prime_u64(2));
  REQUIRE(qblocks::is_prime_u64(3));
  REQUIRE(qblocks::is_prime_u64(5));
  REQUIRE(qblocks::is_prime_u64(9973));
  REQUIRE(qblocks::is_prime_u64((1ull << 61) - 1));
  REQUIRE_FALSE(qblocks::is_prime_u64(0));
  REQUIRE_FALSE(qblocks::is_prime_u64(1));
  REQUIRE_FALSE(qblocks::is_prime_u64(9));
  REQUIRE_FALSE(qblocks::is_prime_u64(1001));
  REQUIRE_FALSE(qblocks::is_prime_u64(6700417ull * 6700417ull));
}
