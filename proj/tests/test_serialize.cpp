#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "qblocks/bundle.hpp"
#include "qblocks/residue.hpp"
#include "qblocks/skein.hpp"
#include "qblocks/surfaces.hpp"

using qblocks::Bundle;
using qblocks::parse_error;
using qblocks::ResidueField;
using qblocks::SkeinCtx;
using qblocks::SurfaceSpec;

namespace {

Bundle reference_bundle() {
  SkeinCtx cx(7, 1);
  qblocks::SurfaceRep rep =
      qblocks::build_rep(cx, SurfaceSpec::twice_holed_torus(2, 4));
  Bundle b = qblocks::make_bundle(rep);
  b.hints.push_back("reference cell at level 7");
  return b;
}

std::size_t error_offset(const std::string& text) {
  try {
    qblocks::parse_bundle(text);
  } catch (const parse_error& e) {
    return e.offset;
  }
  FAIL("expected a parse error");
  return 0;
}

}  // namespace

TEST_CASE("bundle round-trip is byte-identical", "[serialize]") {
  Bundle b = reference_bundle();
  std::string text = qblocks::serialize_bundle(b);
  REQUIRE(text.rfind("qblocks-bundle:1\n", 0) == 0);
  Bundle back = qblocks::parse_bundle(text);
  REQUIRE(qblocks::serialize_bundle(back) == text);

  REQUIRE(back.p == b.p);
  REQUIRE(back.t == b.t);
  REQUIRE(back.spec.name() == b.spec.name());
  REQUIRE(back.edges == b.edges);
  REQUIRE(back.basis == b.basis);
  REQUIRE(back.hints == b.hints);
  REQUIRE(back.matrices.size() == b.matrices.size());
  for (std::size_t k = 0; k < b.matrices.size(); ++k) {
    REQUIRE(back.matrices[k].role == b.matrices[k].role);
    REQUIRE(back.matrices[k].name == b.matrices[k].name);
    REQUIRE(back.matrices[k].provenance == b.matrices[k].provenance);
    REQUIRE(back.matrices[k].mat == b.matrices[k].mat);
  }
  for (std::size_t k = 0; k < b.weights.size(); ++k)
    REQUIRE(back.weights[k] == b.weights[k]);
}

TEST_CASE("bundle corruption is reported with a byte offset", "[serialize]") {
  std::string text = qblocks::serialize_bundle(reference_bundle());

  // wrong magic
  std::string bad = text;
  bad[0] = 'x';
  REQUIRE(error_offset(bad) == 0);

  // a damaged digit inside the first matrix row
  std::size_t mat = text.find("matrix:");
  std::size_t row = text.find('\n', mat) + 1;
  bad = text;
  bad[row] = '!';
  std::size_t off = error_offset(bad);
  REQUIRE(off >= row);
  REQUIRE(off < bad.size());

  // truncation
  bad = text.substr(0, text.size() / 2);
  REQUIRE_THROWS_AS(qblocks::parse_bundle(bad), parse_error);

  // trailing garbage after the terminator
  bad = text + "extra\n";
  off = error_offset(bad);
  REQUIRE(off >= text.size());

  // an unknown role line
  bad = text;
  std::size_t role = bad.find("matrix:curve:");
  bad.replace(role, 13, "matrix:curvy:");
  REQUIRE(error_offset(bad) >= role);
}

TEST_CASE("residue bundle round-trip", "[serialize]") {
  Bundle b = reference_bundle();
  ResidueField F(29, 7, {4, 1});
  qblocks::ResidueBundle rb = qblocks::reduce_bundle(b, F);
  std::string text = qblocks::serialize_residue_bundle(rb);
  REQUIRE(text.rfind("qblocks-residues:1\n", 0) == 0);
  qblocks::ResidueBundle back = qblocks::parse_residue_bundle(text);
  REQUIRE(qblocks::serialize_residue_bundle(back) == text);
  REQUIRE(back.q == 29);
  REQUIRE(back.f == 1);
  REQUIRE(back.p == 7);
  REQUIRE(back.modulus == rb.modulus);
  REQUIRE(back.matrices.size() == rb.matrices.size());
  for (std::size_t k = 0; k < rb.matrices.size(); ++k)
    REQUIRE(back.matrices[k].mat.e == rb.matrices[k].mat.e);

  // an extension field round-trips its modulus line too
  ResidueField G(13, 7, {1, 3, 1});
  qblocks::ResidueBundle rb2 = qblocks::reduce_bundle(b, G);
  std::string text2 = qblocks::serialize_residue_bundle(rb2);
  REQUIRE(qblocks::serialize_residue_bundle(
              qblocks::parse_residue_bundle(text2)) == text2);

  // corruption inside the field header
  std::string bad = text;
  std::size_t qpos = bad.find("q:29");
  bad[qpos + 2] = 'z';
  REQUIRE_THROWS_AS(qblocks::parse_residue_bundle(bad), parse_error);
  // out-of-range coefficient
  std::string bad2 = text2;
  std::size_t mpos = bad2.find("mod:1,3,1");
  bad2.replace(mpos, 9, "mod:1,99,1");
  REQUIRE_THROWS_AS(qblocks::parse_residue_bundle(bad2), parse_error);
}

TEST_CASE("reduction refuses a bad characteristic", "[serialize]") {
  Bundle b = reference_bundle();
  // mismatched levels are rejected up front
  ResidueField F5(11, 5, {2, 1});
  REQUIRE_THROWS_AS(qblocks::reduce_bundle(b, F5), std::invalid_argument);
  // a denominator divisible by q poisons the whole bundle
  b.weights[0] = mpq_class(1, 29) * b.weights[0];
  ResidueField F(29, 7, {4, 1});
  REQUIRE_THROWS_AS(qblocks::reduce_bundle(b, F), qblocks::bad_prime_error);
}

TEST_CASE("dimension table round-trip", "[serialize]") {
  qblocks::DimTable t;
  t.timestamp_line = "# generated: 2026-08-18T00:00:00Z";
  t.rows.push_back({2, 7, {}, mpz_class(14), "recursion"});
  t.rows.push_back({1, 7, {2, 4}, mpz_class(3), "enumeration"});
  t.rows.push_back({3, 13, {10}, mpz_class(5915), "closed-form"});
  std::string text = qblocks::serialize_dim_table(t);
  qblocks::DimTable back = qblocks::parse_dim_table(text);
  REQUIRE(qblocks::serialize_dim_table(back) == text);
  REQUIRE(back.timestamp_line == t.timestamp_line);
  REQUIRE(back.rows.size() == 3);
  REQUIRE(back.rows[1].labels == std::vector<int>{2, 4});
  REQUIRE(back.rows[2].dim == 5915);

  // suppressed timestamp stays suppressed
  t.timestamp_line.clear();
  std::string bare = qblocks::serialize_dim_table(t);
  REQUIRE(bare.rfind("g\tp\tlabels\tdim\tmethod\n", 0) == 0);
  REQUIRE(qblocks::serialize_dim_table(qblocks::parse_dim_table(bare)) ==
          bare);

  // header and cell damage both carry offsets
  std::string bad = bare;
  bad[0] = 'h';
  REQUIRE_THROWS_AS(qblocks::parse_dim_table(bad), parse_error);
  bad = bare;
  std::size_t pos = bad.find("5915");
  bad.replace(pos, 4, "x915");
  try {
    qblocks::parse_dim_table(bad);
    FAIL("expected a parse error");
  } catch (const parse_error& e) {
    REQUIRE(e.offset >= pos - 20);
  }
}

TEST_CASE("labels string form", "[serialize]") {
  REQUIRE(qblocks::labels_to_string({}) == "()");
  REQUIRE(qblocks::labels_to_string({2}) == "(2)");
  REQUIRE(qblocks::labels_to_string({2, 4}) == "(2,4)");
  REQUIRE(qblocks::labels_from_string("(2,4)", 0) == std::vector<int>{2, 4});
  REQUIRE(qblocks::labels_from_string("()", 0).empty());
  REQUIRE_THROWS_AS(qblocks::labels_from_string("2,4", 0), parse_error);
}
