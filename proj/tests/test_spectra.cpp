#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "branchdiam/errors.hpp"
#include "branchdiam/quotient.hpp"
#include "branchdiam/spectra.hpp"
#include "branchdiam/words.hpp"

using namespace branchdiam;

namespace {
GroupSpec grig() { return GroupSpec::grigorchuk(); }
std::vector<GeneratorWord> grig_gens() { return standard_generators(grig()); }
}  // namespace

TEST_CASE("order-2 quotient: lambda2 = -1, gap = 2, mixing time 1") {
  GroupSpec g = grig();
  GeneratorWord a = word_from_string(g, "a");
  FiniteQuotient q = enumerate(g, {a}, 1);
  REQUIRE(q.order() == 2);
  SpectralReport rep = spectral_gap(q, {a});
  CHECK(rep.lambda2 == doctest::Approx(-1.0));
  CHECK(rep.gap == doctest::Approx(2.0));
  CHECK(rep.generating);
  CHECK(rep.dense);
  CHECK(rep.diameter == 1);
  CHECK(rep.gap_lower_bound == doctest::Approx(1.0));
  CHECK(rep.inequality_checked);
  CHECK(rep.inequality_holds);
  REQUIRE(rep.eigenvalues.size() == 2);
  CHECK(rep.eigenvalues.back() == doctest::Approx(1.0));
  MixingReport mix = mixing_time(q, {a});
  CHECK(mix.time == 1);
  CHECK(mix.exact);
  CHECK(mix.monotone);
  REQUIRE(mix.trace.size() == 2);
  CHECK(mix.trace[0] == doctest::Approx(0.5));
  CHECK(mix.trace[1] == doctest::Approx(0.0));
}

TEST_CASE("loops from trivially-acting generators: gap 1/2 at level 1") {
  FiniteQuotient q = enumerate(grig(), grig_gens(), 1);
  SpectralReport rep = spectral_gap(q, grig_gens());
  // b, c, d act trivially at level 1, so A = (3I + P)/4 with P the swap.
  CHECK(rep.lambda2 == doctest::Approx(0.5));
  CHECK(rep.gap == doctest::Approx(0.5));
  CHECK(rep.inequality_holds);
}

TEST_CASE("level-3 quotient: gap, diameter, and mixing agree with the "
          "frozen values") {
  FiniteQuotient q = enumerate(grig(), grig_gens(), 3);
  SpectralReport rep = spectral_gap(q, grig_gens());
  CHECK(rep.diameter == 8);
  CHECK(rep.gap == doctest::Approx(0.0505).epsilon(0.01));
  CHECK(rep.gap_lower_bound ==
        doctest::Approx(1.0 / (4.0 * 8 * 8)));
  CHECK(rep.inequality_holds);
  MixingReport mix = mixing_time(q, grig_gens());
  CHECK(mix.time == 88);
  CHECK(mix.exact);
  CHECK(mix.monotone);
  // The trace is the observed inf-distance; it must close below 1/(2|q|).
  CHECK(mix.trace.back() <= 1.0 / (2.0 * 128));
}

TEST_CASE("trivial quotient mixes at the first positive step") {
  GroupSpec g = grig();
  GeneratorWord d = word_from_string(g, "d");
  FiniteQuotient q = enumerate(g, {d}, 1);
  REQUIRE(q.order() == 1);
  CHECK(mixing_time(q, {d}).time == 1);
}

TEST_CASE("non-generating sets report lambda2 = 1 with a warning") {
  GroupSpec g = grig();
  std::vector<GeneratorWord> S{word_from_string(g, "a"),
                               word_from_string(g, "d")};
  FiniteQuotient q = enumerate(g, standard_generators(g), 3);
  SpectralReport rep = spectral_gap(q, S);
  CHECK_FALSE(rep.generating);
  CHECK(rep.lambda2 == doctest::Approx(1.0));
  CHECK(rep.gap == doctest::Approx(0.0));
  CHECK_FALSE(rep.inequality_checked);
  CHECK_FALSE(rep.warning.empty());
  CHECK_THROWS_AS((void)mixing_time(q, S), PreconditionError);
}

TEST_CASE("asymmetric generator multisets are rejected") {
  GroupSpec g = GroupSpec::gupta_sidki(3);
  FiniteQuotient q = enumerate(g, standard_generators(g), 1);
  // {a, b} is not inverse-closed in a group of exponent-3 images.
  CHECK_THROWS_AS(
      (void)spectral_gap(
          q, {word_from_string(g, "a"), word_from_string(g, "b")}),
      PreconditionError);
}

TEST_CASE("ball sizes in the infinite group: 1, 5, 11, 23, 40") {
  GrowthTable t = growth(grig(), grig_gens(), 4);
  CHECK(t.sizes == std::vector<std::uint64_t>{1, 5, 11, 23, 40});
  CHECK(t.level_used == 0);
  GrowthTable t2 = growth_stabilized(grig(), grig_gens(), 4);
  CHECK(t2.sizes == t.sizes);
  CHECK(t2.level_used >= 2);
}

TEST_CASE("growth dominates quotient orders at their diameters") {
  GrowthDiameterCheck c1 = growth_diameter_check(grig(), grig_gens(), 1);
  CHECK(c1.quotient_order == 2);
  CHECK(c1.diameter == 1);
  CHECK(c1.ball_size == 5);
  CHECK(c1.holds);
  GrowthDiameterCheck c2 = growth_diameter_check(grig(), grig_gens(), 2);
  CHECK(c2.quotient_order == 8);
  CHECK(c2.diameter == 4);
  CHECK(c2.ball_size == 40);
  CHECK(c2.holds);
  GroupSpec g3 = GroupSpec::gupta_sidki(3);
  GeneratorWord a = word_from_string(g3, "a"), b = word_from_string(g3, "b");
  std::vector<GeneratorWord> S{a, power(a, -1), b, power(b, -1)};
  GrowthDiameterCheck gc = growth_diameter_check(g3, S, 1);
  CHECK(gc.quotient_order == 3);
  CHECK(gc.holds);
}

TEST_CASE("growth exponent constants") {
  GrowthExponentReport r = growth_exponent_report();
  CHECK(r.eta == doctest::Approx(0.810535713766).epsilon(1e-9));
  // eta really is the root of X^3 + X^2 + X = 2.
  CHECK(std::abs(r.eta * r.eta * r.eta + r.eta * r.eta + r.eta - 2.0) < 1e-9);
  CHECK(r.beta == doctest::Approx(0.767429).epsilon(1e-4));
  CHECK(std::abs(r.beta - 0.768) < 1e-3);
  CHECK(r.grig_beta_lower == doctest::Approx(0.194959).epsilon(1e-5));
  CHECK(r.log35_over_log2 == doctest::Approx(5.129283).epsilon(1e-5));
  CHECK(r.grig_beta_lower == doctest::Approx(1.0 / r.log35_over_log2));
}
