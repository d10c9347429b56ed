#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "qblocks/bundle.hpp"
#include "qblocks/quotients.hpp"
#include "qblocks/residue.hpp"
#include "qblocks/skein.hpp"
#include "qblocks/surfaces.hpp"

using qblocks::ClosureResult;
using qblocks::ResidueField;
using qblocks::RMat;
using qblocks::SkeinCtx;
using qblocks::SurfaceSpec;

namespace {

ResidueField prime_field(long q) { return ResidueField(q, 0, {q - 1, 1}); }

// the two standard transvections generating SL(2, q)
std::vector<std::pair<std::string, RMat>> transvections(const ResidueField& F) {
  RMat u = qblocks::rmat_identity(F, 2), l = qblocks::rmat_identity(F, 2);
  qblocks::rmat_set(F, u, 0, 1, F.one());
  qblocks::rmat_set(F, l, 1, 0, F.one());
  return {{"u", u}, {"l", l}};
}

std::vector<RMat> bare(const std::vector<std::pair<std::string, RMat>>& v) {
  std::vector<RMat> out;
  for (const auto& [nm, g] : v) out.push_back(g);
  return out;
}

}  // namespace

TEST_CASE("residue matrix arithmetic", "[quotients]") {
  ResidueField F = prime_field(7);
  RMat u = transvections(F)[0].second;
  REQUIRE(qblocks::rmat_order(F, u) == 7);
  RMat ui = qblocks::rmat_inverse(F, u);
  REQUIRE(qblocks::rmat_is_identity(F, qblocks::rmat_mul(F, u, ui)));
  REQUIRE(qblocks::rmat_pow(F, u, 7).e == qblocks::rmat_identity(F, 2).e);
  REQUIRE(qblocks::rmat_pow(F, u, -1).e == ui.e);
  RMat z = qblocks::rmat_zero(F, 2);
  REQUIRE_THROWS_AS(qblocks::rmat_inverse(F, z), std::runtime_error);
  // transpose is an anti-homomorphism
  RMat l = transvections(F)[1].second;
  REQUIRE(qblocks::rmat_transpose(F, qblocks::rmat_mul(F, u, l)).e ==
          qblocks::rmat_mul(F, qblocks::rmat_transpose(F, l),
                            qblocks::rmat_transpose(F, u))
              .e);
}

TEST_CASE("ambient group orders", "[quotients]") {
  ResidueField F7 = prime_field(7);
  REQUIRE(qblocks::gl_order(F7, 2) == 2016);  // (49-1)(49-7)
  REQUIRE(qblocks::pgl_order(F7, 2) == 336);
  ResidueField G(13, 7, {1, 3, 1});
  REQUIRE(qblocks::gl_order(G, 1) == 168);  // |F_169^*|
}

TEST_CASE("closure of the SL(2,7) transvections", "[quotients]") {
  ResidueField F = prime_field(7);
  ClosureResult res = qblocks::group_closure(F, bare(transvections(F)));
  REQUIRE(res.complete);
  REQUIRE(res.status == "complete");
  REQUIRE(res.order == 336);
  REQUIRE(res.visited == 336);
  REQUIRE(res.order_divides_group);

  // determinism: a rerun reproduces the same sorted key list
  ClosureResult again = qblocks::group_closure(F, bare(transvections(F)));
  REQUIRE(res.used_u64_keys);
  REQUIRE(res.keys64 == again.keys64);

  // the projective image is PSL(2,7) of order 168
  ClosureResult proj =
      qblocks::group_closure(F, bare(transvections(F)), 10000000, true);
  REQUIRE(proj.complete);
  REQUIRE(proj.order == 168);
}

TEST_CASE("caps stop the walk without inventing an order", "[quotients]") {
  ResidueField F = prime_field(7);
  ClosureResult res = qblocks::group_closure(F, bare(transvections(F)), 10);
  REQUIRE_FALSE(res.complete);
  REQUIRE(res.status == "cap-exceeded");
  REQUIRE(res.visited >= 10);
  REQUIRE(res.order == 0);
  REQUIRE_THROWS_AS(
      qblocks::closure_contains(F, res, qblocks::rmat_identity(F, 2)),
      std::logic_error);
}

TEST_CASE("membership through a complete closure", "[quotients]") {
  ResidueField F = prime_field(7);
  auto gens = transvections(F);
  ClosureResult cl = qblocks::group_closure(F, bare(gens));
  REQUIRE(qblocks::closure_contains(F, cl, qblocks::rmat_identity(F, 2)));
  RMat w = qblocks::eval_rmat_word(F, gens, "u*l^-1*u^3*l");
  REQUIRE(qblocks::closure_contains(F, cl, w));
  // det 3 lies outside SL(2,7)
  RMat d3 = qblocks::rmat_identity(F, 2);
  qblocks::rmat_set(F, d3, 0, 0, F.from_int(3));
  REQUIRE_FALSE(qblocks::closure_contains(F, cl, d3));
}

TEST_CASE("key packing round-trips", "[quotients]") {
  ResidueField G(13, 7, {1, 3, 1});
  REQUIRE(qblocks::closure_key_fits_u64(G, 2));
  std::mt19937 rng(3u);
  std::uniform_int_distribution<long> pick(0, 12);
  for (int trial = 0; trial < 25; ++trial) {
    RMat m = qblocks::rmat_zero(G, 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        qblocks::rmat_set(G, m, i, j, {pick(rng), pick(rng)});
    std::uint64_t k = qblocks::closure_key_u64(G, m);
    REQUIRE(qblocks::closure_key_decode_u64(G, 2, k).e == m.e);
    std::string s = qblocks::closure_key_str(m);
    REQUIRE(qblocks::closure_key_decode_str(G, 2, s).e == m.e);
  }
  // 4x4 over F_29 exceeds 64-bit packing and falls back to string keys
  ResidueField F29 = prime_field(29);
  REQUIRE_FALSE(qblocks::closure_key_fits_u64(F29, 4));
}

TEST_CASE("string-keyed closures work beyond the 64-bit packing bound",
          "[quotients]") {
  ResidueField F = prime_field(29);
  // a cyclic group of order 7 embedded as 4x4 diagonal matrices
  RMat g = qblocks::rmat_identity(F, 4);
  qblocks::rmat_set(F, g, 0, 0, F.from_int(25));  // 25 has order 7 mod 29
  ClosureResult res = qblocks::group_closure(F, {g});
  REQUIRE(res.complete);
  REQUIRE_FALSE(res.used_u64_keys);
  REQUIRE(res.order == 7);
}

TEST_CASE("projective normalization", "[quotients]") {
  ResidueField F = prime_field(7);
  RMat m = qblocks::rmat_identity(F, 2);
  RMat m3 = qblocks::rmat_scalar(F, m, F.from_int(3));
  REQUIRE(qblocks::projective_normalize(F, m3).e == m.e);
}

TEST_CASE("random-walk membership certificates", "[quotients]") {
  ResidueField F = prime_field(7);
  auto gens = transvections(F);
  RMat target = qblocks::eval_rmat_word(F, gens, "u*l*u^-2*l^3");

  // with no closure available the walk finds a word, and the word checks out
  qblocks::MembershipOutcome out = qblocks::certify_membership(
      F, gens, {}, target, "", nullptr, false, 20260818, 200000);
  REQUIRE(out.status == "certified");
  REQUIRE_FALSE(out.word.empty());
  REQUIRE(qblocks::eval_rmat_word(F, gens, out.word).e == target.e);

  // a non-member never produces a certificate
  RMat d3 = qblocks::rmat_identity(F, 2);
  qblocks::rmat_set(F, d3, 0, 0, F.from_int(3));
  qblocks::MembershipOutcome miss = qblocks::certify_membership(
      F, gens, {}, d3, "", nullptr, false, 20260818, 20000);
  REQUIRE(miss.status == "undecided");

  // hints short-circuit the search and are verified exactly
  qblocks::MembershipOutcome hinted = qblocks::certify_membership(
      F, gens, {}, target, "u*l*u^-2*l^3", nullptr, false, 1, 10);
  REQUIRE(hinted.status == "certified");
  REQUIRE(hinted.word == "u*l*u^-2*l^3");
}

TEST_CASE("subgroup comparison on reference groups", "[quotients]") {
  ResidueField F = prime_field(7);
  auto gens = transvections(F);
  // the same group presented with swapped generator names
  std::vector<std::pair<std::string, RMat>> swapped = {gens[1], gens[0]};
  qblocks::SubgroupComparison same = qblocks::same_subgroup(F, gens, swapped);
  REQUIRE(same.verdict == "same");

  // a proper cyclic subgroup is different
  std::vector<std::pair<std::string, RMat>> cyc = {gens[0]};
  qblocks::SubgroupComparison diff = qblocks::same_subgroup(F, gens, cyc);
  REQUIRE(diff.verdict == "different");
}

TEST_CASE("normality detection", "[quotients]") {
  ResidueField F = prime_field(7);
  auto gens = transvections(F);
  // the center {+-1} is normal
  RMat minus = qblocks::rmat_scalar(F, qblocks::rmat_identity(F, 2),
                                    F.from_int(6));
  qblocks::NormalityReport center =
      qblocks::normality_check(F, gens, {{"z", minus}});
  REQUIRE(center.verdict == "normal");
  // a transvection subgroup is not normal in SL(2,7)
  qblocks::NormalityReport bad =
      qblocks::normality_check(F, gens, {{"u", gens[0].second}});
  REQUIRE(bad.verdict == "not-normal");
  REQUIRE_FALSE(bad.failures.empty());
}

TEST_CASE("strand group closures at split and inert primes", "[quotients]") {
  SkeinCtx cx(7, 1);
  qblocks::SurfaceRep rep =
      qblocks::build_rep(cx, SurfaceSpec::holed_sphere(3, 2));
  qblocks::Bundle b = qblocks::make_bundle(rep);

  struct CellSpec {
    long q;
    qblocks::fq::Poly mod;
    long linear, projective;
  };
  for (const CellSpec& cell :
       {CellSpec{29, {4, 1}, 48720, 12180},
        CellSpec{43, {2, 1}, 158928, 79464},
        CellSpec{13, {1, 3, 1}, 4368, 2184}}) {
    ResidueField F(cell.q, 7, cell.mod);
    qblocks::ResidueBundle rb = qblocks::reduce_bundle(b, F);
    std::vector<RMat> gens;
    for (const auto& m : rb.matrices) gens.push_back(m.mat);
    REQUIRE(gens.size() == 2);
    CAPTURE(cell.q);
    ClosureResult lin = qblocks::group_closure(F, gens);
    REQUIRE(lin.complete);
    REQUIRE(lin.order == cell.linear);
    REQUIRE(lin.order_divides_group);
    ClosureResult proj = qblocks::group_closure(F, gens, 10000000, true);
    REQUIRE(proj.complete);
    REQUIRE(proj.order == cell.projective);
  }
}

TEST_CASE("reduction of a full representation", "[quotients]") {
  SkeinCtx cx(7, 1);
  qblocks::SurfaceRep rep =
      qblocks::build_rep(cx, SurfaceSpec::twice_holed_torus(2, 4));
  ResidueField F(29, 7, {4, 1});
  qblocks::ResidueRep rr = qblocks::reduce_rep(rep, F);
  REQUIRE(rr.dim == 3);
  REQUIRE(rr.curves.size() == rep.curves.size());
  REQUIRE(rr.pushes.size() == rep.pushes.size());
  // reduction respects products: spot-check on the first two curves
  RMat lhs = qblocks::reduce_matrix(rep.curves[0].mat * rep.curves[1].mat, F);
  RMat rhs = qblocks::rmat_mul(F, rr.curves[0].second, rr.curves[1].second);
  REQUIRE(lhs.e == rhs.e);
  // reduced pushes keep order p
  for (const auto& [nm, g] : rr.pushes)
    REQUIRE(qblocks::rmat_order(F, g) == 7);
}

TEST_CASE("desk-cell certificates evaluate to the named twists",
          "[quotients]") {
  SkeinCtx cx(7, 1);
  qblocks::SurfaceRep rep =
      qblocks::build_rep(cx, SurfaceSpec::twice_holed_torus(2, 4));
  ResidueField F(29, 7, {4, 1});
  qblocks::ResidueRep rr = qblocks::reduce_rep(rep, F);

  // dictionary over pushes plus already-certified curve letters
  std::vector<std::pair<std::string, RMat>> dict = rr.pushes;
  for (const auto& c : rr.curves) dict.push_back(c);
  for (const qblocks::MembershipHint& h :
       qblocks::tht_curve_hints_over_pushes()) {
    RMat got = qblocks::eval_rmat_word(F, dict, h.word);
    const RMat* want = nullptr;
    for (const auto& [nm, g] : rr.curves)
      if (nm == h.target) want = &g;
    REQUIRE(want != nullptr);
    CAPTURE(h.target, h.word);
    REQUIRE(got.e == want->e);
  }
  for (const qblocks::MembershipHint& h :
       qblocks::tht_push_hints_over_curves()) {
    RMat got = qblocks::eval_rmat_word(F, dict, h.word);
    const RMat* want = nullptr;
    for (const auto& [nm, g] : rr.pushes)
      if (nm == h.target) want = &g;
    REQUIRE(want != nullptr);
    CAPTURE(h.target, h.word);
    REQUIRE(got.e == want->e);
  }
}
