#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "branchdiam/errors.hpp"
#include "branchdiam/grigorchuk.hpp"
#include "branchdiam/quotient.hpp"
#include "branchdiam/words.hpp"
#include "branchdiam/wreath.hpp"

using namespace branchdiam;

namespace {
GroupSpec grig() { return GroupSpec::grigorchuk(); }

FiniteQuotient& level4() {
  static FiniteQuotient q =
      enumerate(grig(), standard_generators(grig()), 4);
  return q;
}

std::vector<SubgroupHandle>& lcs4() {
  static std::vector<SubgroupHandle> lcs = lower_central_series(level4());
  return lcs;
}
}  // namespace

TEST_CASE("generator relations hold as actions, up to level 10") {
  CHECK(verify_relations(10));
}

TEST_CASE("x = abab has sections (ca, ac)") {
  GeneratorWord x = grig_x();
  CHECK(x == word_from_string(grig(), "abab"));
  Section s = decompose(x);
  CHECK(s.children[0] == word_from_string(grig(), "ca"));
  CHECK(s.children[1] == word_from_string(grig(), "ac"));
  CHECK(in_stab(x, 1));
}

TEST_CASE("lift words push a conjugator into the first section") {
  GeneratorWord w = word_from_string(grig(), "ab");
  GeneratorWord lifted = grig_lift(w);
  CHECK(in_stab(lifted, 1));
  CHECK(decompose(lifted).children[0] == reduce(w));
}

TEST_CASE("commutator identities 1-3 hold exactly at level 8") {
  CHECK(verify_identity_lemma(1, 8));
  CHECK(verify_identity_lemma(2, 8));
  CHECK(verify_identity_lemma(3, 8));
}

TEST_CASE("identity 4 as printed is false; the companion identities pin "
          "what is actually true") {
  // The printed form [x^2,(x,x^-1)] = (x^-1,x,(x^-1,1)x^-1,(1,x^-1)x) does
  // not hold (the two sides only diverge below level 4):
  CHECK(verify_identity_lemma(4, 4));
  CHECK_FALSE(verify_identity_lemma(4, 8));
  GroupSpec g = grig();
  GeneratorWord x = grig_x();
  Elem X(x);
  Elem X2(power(x, 2));
  auto pair = [&](Elem u, Elem v) {
    return Elem::tuple(g, {std::move(u), std::move(v)});
  };
  auto comm = [](const Elem& u, const Elem& v) {
    return u.inv() * v.inv() * u * v;
  };
  Elem xi(inverse(x));
  Elem e(g);
  // ... the printed right-hand side equals [x^2,(x,x)] instead:
  Elem rhs_printed = pair(pair(xi, X), pair(pair(xi, e) * xi,
                                            pair(e, xi) * X));
  CHECK(comm(X2, pair(X, X)).level_perm(8) == rhs_printed.level_perm(8));
  CHECK(comm(X2, pair(X, xi)).level_perm(8) != rhs_printed.level_perm(8));
  // ... and [x^2,(x,x^-1)] equals the flat tuple (x^-1, x, x, x^-1):
  Elem rhs_true = pair(pair(xi, X), pair(X, xi));
  CHECK(comm(X2, pair(X, xi)).level_perm(8) == rhs_true.level_perm(8));
}

TEST_CASE("degree formula and branch embeddings") {
  // No embedding maps: deg x = 2, deg x^2 = 3.
  DegreeQuery q0;
  CHECK(degree_formula(q0) == 2);
  DegreeQuery q0s;
  q0s.squared = true;
  CHECK(degree_formula(q0s) == 3);
  // One map: zero(x) has degree 1 + 0 + 2 = 3, one(x) has 1 + 1 + 2 = 4.
  DegreeQuery z;
  z.bits = {0};
  CHECK(degree_formula(z) == 3);
  DegreeQuery o;
  o.bits = {1};
  CHECK(degree_formula(o) == 4);
  // The realizing words act trivially on as many levels as maps applied.
  CHECK(in_stab(branch_embed(z), 1));
  CHECK(in_stab(branch_embed(o), 1));
  DegreeQuery two;
  two.bits = {1, 0};
  CHECK(in_stab(branch_embed(two), 2));
}

TEST_CASE("degree placement in the level-4 quotient is never contradicted") {
  int verified = 0;
  for (int bits = 0; bits <= 2; ++bits)
    for (int mask = 0; mask < (1 << bits); ++mask)
      for (int sq = 0; sq <= 1; ++sq) {
        DegreeQuery query;
        query.squared = sq == 1;
        for (int i = 0; i < bits; ++i) query.bits.push_back((mask >> i) & 1);
        VerifyStatus st = verify_degree(level4(), lcs4(), query);
        CHECK(st != VerifyStatus::Contradicted);
        if (st == VerifyStatus::Verified) ++verified;
      }
  CHECK(verified > 0);
}

TEST_CASE("branch subgroup images and the squaring step") {
  CHECK(level4().order() / grig_K_image(level4(), 0).order() == 16);
  CHECK(lcs4()[4].index_in_parent() == 256);
  CHECK(verify_squaring(level4(), lcs4(), 1));
}

TEST_CASE("covering balls cover and consist of shortest representatives") {
  int radius = 0;
  const auto& gamma5 = lcs4()[4];
  auto X = covering_ball(level4(), gamma5, gamma5, &radius);
  CHECK(X.size() == 256);
  CHECK(radius >= 1);
  // Each word's image lies in a distinct gamma_5-coset.
  CosetGroup G(level4(), gamma5);
  std::vector<bool> seen(G.order(), false);
  for (const auto& w : X) {
    auto idx = level4().index_of(level_permutation(w, 4));
    REQUIRE(idx.has_value());
    std::uint32_t c = G.coset_of(*idx);
    CHECK_FALSE(seen[c]);
    seen[c] = true;
    CHECK(static_cast<int>(w.length()) <= radius);
  }
}

TEST_CASE("base-constant search settles on the worst case 14") {
  CtildeResult ct = grig_ctilde(level4(), lcs4());
  CHECK(ct.value == 14);
  CHECK(ct.worst_case);
}

TEST_CASE("diameter bound composition") {
  // Below the first threshold the bound is the base constant itself.
  CHECK(diameter_bound(5, 14) == 14);
  CHECK(diameter_bound(9, 14) == 14 * 35);
  CHECK(diameter_bound(17, 14) == mpz_class(14) * 35 * 35);
  CHECK(diameter_bound(2, 14) == 14);
}

TEST_CASE("cover-growth step rejects shallow inputs") {
  CHECK_THROWS_AS(
      sk_step_verify(level4(), lcs4(), 1, std::vector<GeneratorWord>{}),
      PreconditionError);
}
