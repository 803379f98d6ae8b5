#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "branchdiam/errors.hpp"
#include "branchdiam/guptasidki.hpp"
#include "branchdiam/words.hpp"
#include "branchdiam/wreath.hpp"

using namespace branchdiam;

namespace {
GeneratorWord w(const GroupSpec& g, const char* s) {
  return word_from_string(g, s);
}

Elem epow(const Elem& e, int k) {
  Elem base = k < 0 ? e.inv() : e;
  int n = k < 0 ? -k : k;
  Elem acc(base.group());
  for (int i = 0; i < n; ++i) acc = acc * base;
  return acc;
}
}  // namespace

TEST_CASE("x-chain: x_1 has sections (b^-1 a, a, a b) at p = 3") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  auto xs = x_chain(3);
  REQUIRE(xs.size() == 2);
  CHECK(xs[0] == commutator(w(g, "a"), w(g, "b")));
  CHECK(xs[1] == commutator(w(g, "a"), xs[0]));
  Section s = decompose(xs[0]);
  CHECK(reduce(s.children[0]) ==
        reduce(concat(inverse(w(g, "b")), w(g, "a"))));
  CHECK(reduce(s.children[1]) == w(g, "a"));
  CHECK(reduce(s.children[2]) == reduce(concat(w(g, "a"), w(g, "b"))));
}

TEST_CASE("bold maps carry signed binomial exponents") {
  auto xs = x_chain(3);
  auto b0 = bold(0, xs[0]);
  CHECK(b0.alpha == std::vector<long long>{1, 0, 0});
  auto b1 = bold(1, xs[0]);
  CHECK(b1.alpha == std::vector<long long>{1, -1, 0});
  auto b2 = bold(2, xs[0]);
  CHECK(b2.alpha == std::vector<long long>{1, -2, 1});
  // (p-1)(g) is (g, ..., g) only after reducing the exponents mod p.
  auto b6 = bold(6, w(GroupSpec::gupta_sidki(7), "a"));
  for (int i = 0; i < 7; ++i) CHECK(((b6.alpha[i] % 7) + 7) % 7 == 1);
  CHECK(b6.alpha[1] == -6);
  CHECK(b6.alpha[3] == -20);
}

TEST_CASE("bold recursion (j+1)(g) = [a, j(g)] holds exactly") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  auto xs = x_chain(3);
  Elem A(w(g, "a"));
  for (int j = 0; j <= 1; ++j) {
    Elem lhs = bold(j + 1, xs[0]).element;
    Elem bj = bold(j, xs[0]).element;
    Elem rhs = A.inv() * bj.inv() * A * bj;
    CHECK(elem_is_identity(lhs * rhs.inv()));
  }
}

TEST_CASE("membership in the subgroup lattice") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  GeneratorWord a = w(g, "a"), b = w(g, "b");
  CHECK(member(SubgroupName::K(), commutator(a, b)));
  CHECK_FALSE(member(SubgroupName::K(), b));
  CHECK_FALSE(member(SubgroupName::K(), a));
  auto xs = x_chain(3);
  for (const auto& x : xs) CHECK(member(SubgroupName::K(), x));
  // x_2 agrees with (b, b, b) modulo K^(x 3).
  Elem e = Elem(xs[1]) *
           Elem::tuple(g, {Elem(inverse(b)), Elem(inverse(b)),
                           Elem(inverse(b))});
  CHECK(member(SubgroupName::Kpow(1), e));
  // Nothing in the x-basis lies in K^(x 3) on its own.
  CHECK_FALSE(member(SubgroupName::Kpow(1), xs[0]));
  CHECK_FALSE(member(SubgroupName::Kpow(1), xs[1]));
  // Layer filtration: x_i is in L(i) but not L(i+1).
  CHECK(member(SubgroupName::L(1), xs[0]));
  CHECK_FALSE(member(SubgroupName::L(2), xs[0]));
  CHECK(member(SubgroupName::L(2), xs[1]));
  CHECK_FALSE(member(SubgroupName::L(3), xs[1]));
  // Bold layers: j(x_1) lies in Kbold(i,1) exactly when j >= i.
  CHECK(member(SubgroupName::Kbold(1, 1), bold(1, xs[0]).element));
  CHECK(member(SubgroupName::Kbold(2, 1), bold(2, xs[0]).element));
  CHECK_FALSE(member(SubgroupName::Kbold(2, 1), bold(1, xs[0]).element));
  // Out-of-range subscripts are rejected.
  CHECK_THROWS_AS((void)member(SubgroupName::L(0), xs[0]), PreconditionError);
  CHECK_THROWS_AS((void)member(SubgroupName::L(4), xs[0]), PreconditionError);
  CHECK_THROWS_AS((void)member(SubgroupName::Kbold(4, 1), xs[0]),
                  PreconditionError);
}

TEST_CASE("subgroup names render distinctly") {
  CHECK(SubgroupName::K().str() != SubgroupName::Kpow(1).str());
  CHECK(SubgroupName::L(2).str() != SubgroupName::Lpow(2, 1).str());
  CHECK_FALSE(SubgroupName::Kbold(1, 1).str().empty());
  CHECK_FALSE(SubgroupName::Stab(2).str().empty());
}

TEST_CASE("x-coordinates separate all exponent combinations at p = 3") {
  auto xs = x_chain(3);
  for (int l1 = 0; l1 < 3; ++l1)
    for (int l2 = 0; l2 < 3; ++l2) {
      GeneratorWord u = concat(power(xs[0], l1), power(xs[1], l2));
      auto c = x_coordinates(Elem(u));
      CHECK(c == std::vector<int>{l1, l2});
    }
  CHECK_THROWS_AS((void)x_coordinates(Elem(w(GroupSpec::gupta_sidki(3), "b"))),
                  PreconditionError);
}

TEST_CASE("commutator identity p >= 7 holds exactly") {
  CHECK(verify_gs_identity(GSIdentity::ZeroAsCommutator, 7));
}

TEST_CASE("p = 5: the section identity is exact, but the stated congruences "
          "need exponent 3, not 2") {
  GroupSpec g = GroupSpec::gupta_sidki(5);
  auto xs = x_chain(5);
  GeneratorWord a = w(g, "a"), b = w(g, "b");
  GeneratorWord comm = commutator(xs[0], conjugate(xs[0], a));
  // [x_1, x_1^a] = (x_1, a b a^-2 b^-1 a, 1, 1, 1) exactly.
  GeneratorWord mid = reduce(concat(
      concat(a, b), concat(power(a, -2), concat(inverse(b), a))));
  Elem rhs = Elem::tuple(
      g, {Elem(xs[0]), Elem(mid), Elem(g), Elem(g), Elem(g)});
  CHECK((Elem(comm) * rhs.inv()).level_perm(3).is_identity());
  // The middle section is NOT congruent to x_1 modulo L(2): its unique
  // x-coordinates are (2, 1, 1, 1).
  CHECK(x_coordinates(Elem(mid)) == std::vector<int>{2, 1, 1, 1});
  CHECK_FALSE(member(SubgroupName::L(2),
                     Elem(mid) * Elem(inverse(xs[0]))));
  // Consequently the commutator matches 0(x_1)^3 modulo Kbold(1,1), and the
  // exponent-2 version fails.
  Elem z = bold(0, xs[0]).element;
  CHECK(member(SubgroupName::Kbold(1, 1), Elem(comm) * epow(z, -3)));
  CHECK_FALSE(member(SubgroupName::Kbold(1, 1), Elem(comm) * epow(z, -2)));
  // The bundled check reports the stated (false) congruence honestly.
  CHECK_FALSE(verify_gs_identity(GSIdentity::SquareCongruence, 5));
}

TEST_CASE("p = 3: the scalar congruence holds modulo Kbold(1,1) but not "
          "modulo Lpow(2,1); tuples hold modulo Kbold(1,2) but not "
          "modulo Lpow(2,2)") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  auto xs = x_chain(3);
  GeneratorWord b = w(g, "b");
  Elem z = bold(0, xs[0]).element;
  Elem scalar = Elem(commutator(b, xs[0])) * z.inv();
  CHECK(member(SubgroupName::Kbold(1, 1), scalar));
  CHECK_FALSE(member(SubgroupName::Lpow(2, 1), scalar));
  CHECK(verify_gs_identity(GSIdentity::SectionCongruence, 3));
  // Tuple form for lambda = (1, 0, 0).
  Elem X2(xs[1]);
  Elem lhs_arg = Elem::tuple(g, {Elem(xs[0]), Elem(g), Elem(g)});
  Elem comm = X2.inv() * lhs_arg.inv() * X2 * lhs_arg;
  Elem rhs = Elem::tuple(g, {z, Elem(g), Elem(g)});
  Elem diff = comm * rhs.inv();
  CHECK(member(SubgroupName::Kbold(1, 2), diff));
  CHECK_FALSE(member(SubgroupName::Lpow(2, 2), diff));
}

TEST_CASE("identity checks reject mismatched primes") {
  CHECK_THROWS_AS((void)verify_gs_identity(GSIdentity::ZeroAsCommutator, 5),
                  PreconditionError);
  CHECK_THROWS_AS((void)verify_gs_identity(GSIdentity::SquareCongruence, 3),
                  PreconditionError);
  CHECK_THROWS_AS((void)verify_gs_identity(GSIdentity::SectionCongruence, 7),
                  PreconditionError);
}

TEST_CASE("generator relations hold as actions") {
  CHECK(gs_verify_relations(3, 10));
  CHECK(gs_verify_relations(5, 8));
  CHECK(gs_verify_relations(7, 6));
}

TEST_CASE("conjugation samples for the normality facts") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  auto xs = x_chain(3);
  GeneratorWord a = w(g, "a"), b = w(g, "b");
  // x_i^a = x_i x_{i+1}^-1 holds by definition of the chain.
  CHECK(reduce(conjugate(xs[0], a)) ==
        reduce(concat(xs[0], inverse(xs[1]))));
  // Commutators of level-1 stabilizer elements land in K^(x 3).
  CHECK(member(SubgroupName::Kpow(1), commutator(b, xs[0])));
  CHECK(member(SubgroupName::Kpow(1), commutator(b, xs[1])));
  // Commutators of stabilizer elements against K^(x 3) land in L(2)^(x 3).
  Elem z = bold(0, xs[0]).element;
  Elem B(b);
  CHECK(member(SubgroupName::Lpow(2, 1), B.inv() * z.inv() * B * z));
}

TEST_CASE("covering constants") {
  CpConstant c3 = cp(3);
  CHECK(c3.value == 111);
  CHECK(c3.a.size() == 3);
  CHECK(c3.a[0] == 4);
  CHECK(c3.a[1] == 10);
  CHECK(c3.a[2] == 22);
  CHECK(c3.b.size() == 2);
  CHECK(cp(5).value == 2663);
  // The closed-form cross-check runs for every constructed constant.
  for (int p : {7, 11, 13}) CHECK(cp(p).value > 0);
  CHECK_THROWS_AS((void)cp(4), PreconditionError);
}

TEST_CASE("branch-power quotients enumerate to the exact orders") {
  KpowQuotient q31(3, 1);
  CHECK(q31.order() == 81);
  CHECK(q31.radius() == 6);
  GroupSpec g = GroupSpec::gupta_sidki(3);
  GeneratorWord a = w(g, "a"), b = w(g, "b");
  CHECK(q31.coset_of(concat(a, b)) ==
        q31.mul_word(q31.coset_of(a), b));
  CHECK(q31.mul_word(q31.coset_of(a), inverse(a)) == q31.identity());
  CHECK(q31.inv(q31.coset_of(a)) == q31.coset_of(inverse(a)));
  for (std::uint32_t c : {0u, 1u, 17u, 80u})
    CHECK(q31.coset_of(q31.rep(c)) == c);
  CHECK(KpowQuotient(3, 2).order() == 59049);
  CHECK(KpowQuotient(5, 1).order() == 15625);
}

TEST_CASE("cover-growth step at p = 3: exponent 5 against the bound 111") {
  int radius = 0;
  auto ball = gs_covering_ball(3, &radius);
  CHECK(ball.size() == 81);
  CHECK(radius == 6);
  std::vector<GeneratorWord> X = ball;
  for (const auto& u : ball) X.push_back(inverse(u));
  SKReport rep = sk_step_verify_gs(3, 1, X);
  CHECK(rep.exponent == 5);
  CHECK(rep.bound == 111);
  CHECK(rep.within_bound);
  CHECK(rep.group_order == 59049);
  // Larger parameters are out of enumeration reach and refused.
  CHECK_THROWS_AS((void)sk_step_verify_gs(5, 1, X), Error);
  CHECK_THROWS_AS((void)sk_step_verify_gs(3, 2, X), Error);
  // A non-covering X is rejected.
  GroupSpec g = GroupSpec::gupta_sidki(3);
  std::vector<GeneratorWord> tiny{GeneratorWord(g), w(g, "a"),
                                  reduce(inverse(w(g, "a")))};
  CHECK_THROWS_AS((void)sk_step_verify_gs(3, 1, tiny), PreconditionError);
}

TEST_CASE("inclusion-chain sampling finds no failures") {
  GSChainReport r3 = gs_component_chains(3, 60, 777);
  CHECK(r3.all_ok());
  CHECK(r3.step1_failures == 0);
  CHECK(r3.step2_failures == 0);
  CHECK(r3.step3_failures == 0);
  CHECK(r3.exact_tuple_identity);
  GSChainReport r5 = gs_component_chains(5, 40, 777);
  CHECK(r5.all_ok());
}

TEST_CASE("index bounds: the one-shot bound fails at n = 3 while the "
          "stepwise bound survives") {
  GSIndexBounds b1 = gs_index_bounds(3, 1);
  CHECK(b1.printed_bound == 3);
  CHECK(b1.kpow_index == mpz_class(3) * 3 * 3 * 3);  // 3^(3^1+1)
  REQUIRE(b1.enumerated_stab_index.has_value());
  CHECK(*b1.printed_bound_holds);
  CHECK(*b1.stepwise_bound_holds);
  GSIndexBounds b2 = gs_index_bounds(3, 2);
  CHECK(*b2.printed_bound_holds);
  CHECK(*b2.stepwise_bound_holds);
  GSIndexBounds b3 = gs_index_bounds(3, 3);
  CHECK(b3.printed_bound == 19683);   // 3^9, too big:
  REQUIRE(b3.enumerated_stab_index.has_value());
  CHECK(*b3.enumerated_stab_index == 2187);  // the true index is 3^7
  CHECK_FALSE(*b3.printed_bound_holds);
  CHECK(*b3.stepwise_bound_holds);
}

TEST_CASE("recurrence sequences and their closed forms") {
  GS3Sequences s = gs3_sequences(40);
  CHECK(s.alpha[1] == 1);
  CHECK(s.alpha[2] == 2);
  CHECK(s.alpha[5] == 29);
  CHECK(s.beta[2] == 3);
  CHECK(s.beta[5] == 49);
  for (int n = 3; n <= 40; ++n) {
    CHECK(s.alpha[n] == 2 * s.alpha[n - 1] + s.alpha[n - 2]);
    CHECK(s.beta[n] == s.beta[n - 1] + s.alpha[n]);
  }
  CHECK(s.closed_form_match);
}

TEST_CASE("lower-central-series index checks at p = 3") {
  GS3IndexChecks c = gs3_index_checks();
  CHECK(c.gamma2_index == 9);
  CHECK(c.idx_m1_ok);
  CHECK(c.containment_m1);
  CHECK_FALSE(c.containment_m2.has_value());
  CHECK(c.gamma4_index_level3 == 243);
  CHECK(c.idx_m2_image_matches);
}
