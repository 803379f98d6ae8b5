#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "branchdiam/errors.hpp"
#include "branchdiam/words.hpp"
#include "branchdiam/wreath.hpp"

using namespace branchdiam;

namespace {
GroupSpec grig() { return GroupSpec::grigorchuk(); }
GeneratorWord w(GroupSpec g, const char* s) { return word_from_string(g, s); }
}  // namespace

TEST_CASE("grigorchuk wreath recursion b=(a,c), c=(a,d), d=(1,b)") {
  Section b = decompose(w(grig(), "b"));
  CHECK(b.root == std::vector<int>{0, 1});
  CHECK(b.children[0] == w(grig(), "a"));
  CHECK(b.children[1] == w(grig(), "c"));
  Section c = decompose(w(grig(), "c"));
  CHECK(c.children[0] == w(grig(), "a"));
  CHECK(c.children[1] == w(grig(), "d"));
  Section d = decompose(w(grig(), "d"));
  CHECK(d.children[0].empty());
  CHECK(d.children[1] == w(grig(), "b"));
  Section a = decompose(w(grig(), "a"));
  CHECK(a.root == std::vector<int>{1, 0});
  CHECK(a.children[0].empty());
  CHECK(a.children[1].empty());
}

TEST_CASE("gupta-sidki wreath recursion b = (a, a^-1, 1, ..., 1, b)") {
  for (int p : {3, 5, 7}) {
    GroupSpec g = GroupSpec::gupta_sidki(p);
    Section b = decompose(w(g, "b"));
    CHECK(b.children[0] == w(g, "a"));
    CHECK(b.children[1] == reduce(inverse(w(g, "a"))));
    for (int i = 2; i < p - 1; ++i) CHECK(b.children[i].empty());
    CHECK(b.children[p - 1] == w(g, "b"));
    Section a = decompose(w(g, "a"));
    // a is the forward cycle x -> x+1 on the alphabet.
    for (int x = 0; x < p; ++x) CHECK(a.root[x] == (x + 1) % p);
  }
}

TEST_CASE("level permutations compose under the left-to-right convention") {
  GroupSpec g = grig();
  GeneratorWord u = w(g, "ab"), v = w(g, "ca");
  for (int n = 1; n <= 5; ++n) {
    LevelPermutation lu = level_permutation(u, n);
    LevelPermutation lv = level_permutation(v, n);
    CHECK(compose(lu, lv) == level_permutation(concat(u, v), n));
    CHECK(compose(lu, inverse(lu)) == identity_perm(2, n));
  }
  // MSB-first vertex encoding: a at level 2 swaps blocks {0,1} and {2,3}.
  CHECK(level_permutation(w(g, "a"), 2).csv() == "2,3,0,1");
}

TEST_CASE("stabilizer membership and known element orders") {
  GroupSpec g = grig();
  CHECK(in_stab(w(g, "d"), 1));
  CHECK_FALSE(in_stab(w(g, "a"), 1));
  CHECK(in_stab(w(g, "abab"), 1));
  // Orders of the generator products: |ab| = 16, |ac| = 8, |ad| = 4.
  auto order_of = [&](const char* s) {
    GeneratorWord x = w(g, s);
    for (int k = 1; k <= 32; ++k)
      if (is_identity(power(x, k))) return k;
    return -1;
  };
  CHECK(order_of("ab") == 16);
  CHECK(order_of("ac") == 8);
  CHECK(order_of("ad") == 4);
  CHECK(order_of("bc") == 2);
}

TEST_CASE("acts_trivially does not assume the relations it checks") {
  GroupSpec g = grig();
  // a^2 as an unreduced two-letter word.
  GeneratorWord aa(g, {Letter{'a', 1}, Letter{'a', 1}});
  for (int n = 1; n <= 6; ++n) CHECK(acts_trivially(aa, n));
  GeneratorWord bc_d(g, {Letter{'b', 1}, Letter{'c', 1}, Letter{'d', 1}});
  for (int n = 1; n <= 6; ++n) CHECK(acts_trivially(bc_d, n));
  CHECK_FALSE(acts_trivially(w(g, "ab"), 2));
}

TEST_CASE("gupta-sidki word problem is guarded, never wrong") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  CHECK(is_identity(power(w(g, "a"), 3)));
  CHECK(is_identity(power(commutator(w(g, "a"), w(g, "b")), 0)));
  CHECK_FALSE(is_identity(commutator(w(g, "a"), w(g, "b"))));
}

TEST_CASE("tuple elements: construction, product, sections") {
  GroupSpec g = grig();
  GeneratorWord x = w(g, "abab");
  // (x, 1) as a tuple element.
  Elem t = Elem::tuple(g, {Elem(x), Elem(g)});
  CHECK(t.root() == std::vector<int>{0, 1});
  CHECK(t.sections()[0].as_word().has_value());
  CHECK(reduce(*t.sections()[0].as_word()) == reduce(x));
  // Products mix words and tuples; level permutations agree with the
  // factorwise composition.
  Elem prod = Elem(w(g, "a")) * t;
  LevelPermutation expect =
      compose(level_permutation(w(g, "a"), 3), t.level_perm(3));
  CHECK(prod.level_perm(3) == expect);
  CHECK((t * t.inv()).level_perm(4).is_identity());
  // A pure word element flattens back to its word.
  Elem word_only = Elem(w(g, "ab")) * Elem(w(g, "ba"));
  REQUIRE(word_only.as_word().has_value());
  CHECK(is_identity(*word_only.as_word()));
}

TEST_CASE("section_words flattens tuple sections") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  GeneratorWord b = w(g, "b");
  Elem t = Elem::tuple(g, {Elem(b), Elem(g), Elem(inverse(b))});
  auto sw = section_words(t);
  REQUIRE(sw.size() == 3);
  CHECK(sw[0] == reduce(b));
  CHECK(sw[1].empty());
  CHECK(sw[2] == reduce(inverse(b)));
}
