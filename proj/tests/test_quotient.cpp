#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>

#include "branchdiam/errors.hpp"
#include "branchdiam/quotient.hpp"
#include "branchdiam/words.hpp"
#include "branchdiam/wreath.hpp"

using namespace branchdiam;

namespace {
FiniteQuotient grig_level(int n) {
  GroupSpec g = GroupSpec::grigorchuk();
  return enumerate(g, standard_generators(g), n);
}
}  // namespace

TEST_CASE("grigorchuk level quotient orders: 2, 8, 128, 4096") {
  CHECK(grig_level(1).order() == 2);
  CHECK(grig_level(2).order() == 8);
  CHECK(grig_level(3).order() == 128);
  CHECK(grig_level(4).order() == 4096);
}

TEST_CASE("gupta-sidki level quotient orders start 3, 27") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  CHECK(enumerate(g, standard_generators(g), 1).order() == 3);
  // The level-2 image sits inside C3 wr C3 with the section exponents of
  // every stabilizer element summing to zero mod 3.
  CHECK(enumerate(g, standard_generators(g), 2).order() == 27);
}

TEST_CASE("group operations in the quotient") {
  FiniteQuotient q = grig_level(3);
  GroupSpec g = q.group();
  auto idx = [&](const char* s) {
    return *q.index_of(level_permutation(word_from_string(g, s), 3));
  };
  CHECK(q.mul(idx("a"), idx("b")) == idx("ab"));
  CHECK(q.inv(idx("ab")) == idx("ba"));
  CHECK(q.mul(idx("a"), idx("a")) == q.identity());
  CHECK(q.perm_of(idx("d")) ==
        level_permutation(word_from_string(g, "d"), 3));
}

TEST_CASE("enumeration respects the element cap") {
  GroupSpec g = GroupSpec::grigorchuk();
  CHECK_THROWS_AS(enumerate(g, standard_generators(g), 4, 100),
                  CapExceededError);
}

TEST_CASE("save/load round trip") {
  FiniteQuotient q = grig_level(3);
  std::string path = "test_quotient_roundtrip.bdq";
  q.save(path);
  FiniteQuotient r = FiniteQuotient::load(path);
  std::remove(path.c_str());
  CHECK(r.order() == q.order());
  CHECK(r.level() == q.level());
  GroupSpec g = q.group();
  auto p = level_permutation(word_from_string(g, "abab"), 3);
  CHECK(q.index_of(p) == r.index_of(p));
}

TEST_CASE("subgroups: image, normal closure, lower central series") {
  FiniteQuotient q = grig_level(4);
  GroupSpec g = q.group();
  // <x>^G for x = abab has index 16 (the quotient is D8 x C2).
  SubgroupHandle K = normal_closure(
      q, {*q.index_of(level_permutation(word_from_string(g, "abab"), 4))});
  CHECK(K.index_in_parent() == 16);
  // The plain subgroup image of {b, c} is the Klein four-group.
  SubgroupHandle bc = subgroup_image(
      q, {word_from_string(g, "b"), word_from_string(g, "c")});
  CHECK(bc.order() == 4);
  CHECK(whole_group(q).order() == q.order());
  auto lcs = lower_central_series(q);
  REQUIRE(lcs.size() >= 5);
  CHECK(lcs[0].order() == q.order());
  // gamma_2 has index 8 (G/[G,G] = C2^3) and gamma_5 has index 256.
  CHECK(lcs[1].index_in_parent() == 8);
  CHECK(lcs[4].index_in_parent() == 256);
  CHECK(lcs.back().is_trivial());
  for (std::size_t i = 0; i + 1 < lcs.size(); ++i)
    CHECK(lcs[i].contains_subgroup(lcs[i + 1]));
}

TEST_CASE("exact diameters with the standard generators") {
  GroupSpec g = GroupSpec::grigorchuk();
  auto S = standard_generators(g);
  CHECK(diameter_words(grig_level(1), S).diameter == 1);
  CHECK(diameter_words(grig_level(2), S).diameter == 4);
  DiameterResult d3 = diameter_words(grig_level(3), S);
  CHECK(d3.diameter == 8);
  // Ball sizes are strictly increasing up to the diameter and reach the
  // whole group.
  CHECK(d3.ball_sizes.front() == 1);
  CHECK(d3.ball_sizes.back() == 128);
  for (std::size_t r = 1; r < d3.ball_sizes.size(); ++r)
    CHECK(d3.ball_sizes[r] > d3.ball_sizes[r - 1]);
  CHECK_THROWS_AS(diameter_words(grig_level(3),
                                 {word_from_string(g, "a"),
                                  word_from_string(g, "d")}),
                  NonGeneratingError);
}

TEST_CASE("coset groups and covering exponents") {
  FiniteQuotient q = grig_level(3);
  auto lcs = lower_central_series(q);
  CosetGroup G(q, lcs[2]);  // q / gamma_3
  CHECK(G.order() == q.order() / lcs[2].order());
  // X = identity + generator cosets: the covering exponent is the diameter
  // of the coset group in those generators.
  std::vector<std::uint32_t> X{G.identity()};
  for (std::uint32_t gi : q.generator_indices())
    X.push_back(G.coset_of(gi));
  int e = covering_exponent(G, X);
  CHECK(e >= 1);
  CoverWitness wit = covering_exponent_witnessed(G, X);
  CHECK(wit.exponent == e);
  // Every witness factor sequence multiplies out to its coset.
  for (std::uint32_t c = 0; c < G.order(); ++c) {
    std::uint32_t acc = G.identity();
    for (int k : wit.factor_sequence(c)) acc = G.mul(acc, X[k]);
    CHECK(acc == c);
  }
}

TEST_CASE("stabilized index detection") {
  GroupSpec g = GroupSpec::grigorchuk();
  StabilizationReport rep = stabilized_index(
      g, {word_from_string(g, "abab")}, 3, 5, true);
  CHECK(rep.stabilized);
  CHECK(rep.stable_value == 16);
}

TEST_CASE("worst-case diameter of small p-group quotients") {
  // q / gamma_3 of the level-3 quotient is a 2-group of order 16; the
  // worst-case symmetric generating set is found by the basis search.
  FiniteQuotient q = grig_level(3);
  auto lcs = lower_central_series(q);
  CosetGroup G(q, lcs[2]);
  std::vector<std::uint32_t> gens;
  for (std::uint32_t gi : q.generator_indices()) gens.push_back(G.coset_of(gi));
  int wd = worst_case_diameter(G, gens);
  DiameterResult base = diameter(q, symmetrize(q, q.generator_indices()));
  CHECK(wd >= 1);
  CHECK(wd <= static_cast<int>(G.order()));
  (void)base;
}
