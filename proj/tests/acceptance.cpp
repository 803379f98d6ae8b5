// Acceptance gate: one pass/fail line per criterion, exit 0 iff all pass.
// Criteria that fail do so because the claimed statement is genuinely false;
// each failure line prints the computed counterexample.
#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "branchdiam/errors.hpp"
#include "branchdiam/grigorchuk.hpp"
#include "branchdiam/guptasidki.hpp"
#include "branchdiam/quotient.hpp"
#include "branchdiam/spectra.hpp"
#include "branchdiam/words.hpp"
#include "branchdiam/wreath.hpp"

using namespace branchdiam;

namespace {

int failures = 0;

void report(int n, const char* what, bool ok, const std::string& detail) {
  std::printf("%s %2d: %s%s%s\n", ok ? "PASS" : "FAIL", n, what,
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

template <typename F>
void criterion(int n, const char* what, F&& f) {
  try {
    std::string detail;
    bool ok = f(detail);
    report(n, what, ok, detail);
  } catch (const std::exception& e) {
    report(n, what, false, std::string("exception: ") + e.what());
  }
}

GroupSpec grig() { return GroupSpec::grigorchuk(); }

FiniteQuotient& grig_level5() {
  static FiniteQuotient q = enumerate(grig(), standard_generators(grig()), 5);
  return q;
}

std::vector<SubgroupHandle>& grig_lcs5() {
  static std::vector<SubgroupHandle> lcs = lower_central_series(grig_level5());
  return lcs;
}

}  // namespace

int main() {
  criterion(1, "generator relations as level-n actions, n <= 10", [](std::string&) {
    bool ok = verify_relations(10);
    for (int p : {3, 5, 7}) ok = gs_verify_relations(p, 10) && ok;
    return ok;
  });

  criterion(2, "commutator identity suite", [](std::string& detail) {
    bool ok = true;
    for (int idx = 1; idx <= 3; ++idx)
      if (!verify_identity_lemma(idx, 8)) {
        ok = false;
        detail += "identity " + std::to_string(idx) + " false; ";
      }
    if (!verify_identity_lemma(4, 8)) {
      ok = false;
      detail +=
          "identity 4 as printed is false: [x^2,(x,x^-1)] computes to the "
          "flat tuple (x^-1, x, x, x^-1), while the printed right-hand side "
          "equals [x^2,(x,x)]; ";
    }
    if (!verify_gs_identity(GSIdentity::SectionCongruence, 3)) {
      ok = false;
      detail += "p=3 congruence false; ";
    }
    if (!verify_gs_identity(GSIdentity::SquareCongruence, 5)) {
      ok = false;
      auto coords = x_coordinates(
          Elem(word_from_string(GroupSpec::gupta_sidki(5), "aba^-2b^-1a")));
      detail += "p=5 congruence as stated is false: the middle section has "
                "x-coordinates (";
      for (std::size_t i = 0; i < coords.size(); ++i)
        detail += (i ? "," : "") + std::to_string(coords[i]);
      detail += ") so [x_1, x_1^a] matches 0(x_1)^3, not 0(x_1)^2, "
                "modulo Kbold(1,1); ";
    }
    if (!verify_gs_identity(GSIdentity::ZeroAsCommutator, 7)) {
      ok = false;
      detail += "p=7 identity false; ";
    }
    return ok;
  });

  criterion(3, "order and index checks", [](std::string& detail) {
    bool ok = true;
    // Grigorchuk level stabilizer indices against 2^(2^(n-1)+1) for n >= 2.
    std::vector<mpz_class> orders;
    GroupSpec g = grig();
    for (int n = 1; n <= 4; ++n)
      orders.push_back(enumerate(g, standard_generators(g), n).order());
    orders.push_back(grig_level5().order());
    for (int n = 2; n <= 5; ++n) {
      mpz_class bound;
      mpz_ui_pow_ui(bound.get_mpz_t(), 2, (1u << (n - 1)) + 1);
      if (orders[n - 1] < bound) {
        ok = false;
        detail += "level-" + std::to_string(n) + " index " +
                  orders[n - 1].get_str() + " < " + bound.get_str() + "; ";
      }
    }
    if (grig_lcs5()[4].index_in_parent() != 256) {
      ok = false;
      detail += "gamma_5 index != 256; ";
    }
    if (KpowQuotient(3, 1).order() != 81 || KpowQuotient(3, 2).order() != 59049) {
      ok = false;
      detail += "branch-power quotient orders wrong; ";
    }
    // Stabilizer index bounds for the Gupta-Sidki 3-group.
    for (int n = 1; n <= 3; ++n) {
      GSIndexBounds b = gs_index_bounds(3, n);
      if (!b.printed_bound_holds || !*b.printed_bound_holds) {
        ok = false;
        detail += "the one-shot stabilizer bound fails at n=" +
                  std::to_string(n) + ": enumerated index " +
                  (b.enumerated_stab_index ? b.enumerated_stab_index->get_str()
                                           : std::string("?")) +
                  " < claimed " + b.printed_bound.get_str() +
                  " (the telescoped stepwise bound " +
                  b.stepwise_bound.get_str() +
                  (b.stepwise_bound_holds && *b.stepwise_bound_holds
                       ? " does hold"
                       : " also fails") +
                  "); ";
      }
    }
    return ok;
  });

  criterion(4, "cover-growth step for the first group, e <= 35", [](std::string& detail) {
    const auto& lcs = grig_lcs5();
    const auto& gamma5 = lcs[4];
    auto X = covering_ball(grig_level5(), gamma5, gamma5);
    SKReport rep = sk_step_verify(grig_level5(), lcs, 2, X);
    detail = "measured e = " + std::to_string(rep.exponent) + ", bound " +
             std::to_string(rep.bound) + ", target order " +
             std::to_string(rep.group_order);
    return rep.within_bound && rep.group_order == (1u << 14);
  });

  criterion(5, "cover-growth step for the p-groups", [](std::string& detail) {
    auto ball = gs_covering_ball(3);
    std::vector<GeneratorWord> X = ball;
    for (const auto& u : ball) X.push_back(inverse(u));
    SKReport rep = sk_step_verify_gs(3, 1, X);
    detail = "p=3: measured e = " + std::to_string(rep.exponent) +
             " <= " + std::to_string(rep.bound);
    bool ok = rep.within_bound;
    for (int p : {3, 5}) {
      GSChainReport chains = gs_component_chains(p, 200, 12345);
      detail += "; p=" + std::to_string(p) + " chains " +
                std::to_string(chains.step1_checked + chains.step2_checked +
                               chains.step3_checked) +
                " samples, " +
                std::to_string(chains.step1_failures + chains.step2_failures +
                               chains.step3_failures) +
                " failures";
      ok = chains.all_ok() && ok;
    }
    return ok;
  });

  criterion(6, "covering constants match their closed form", [](std::string& detail) {
    bool ok = cp(3).value == 111;
    for (int p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31})
      (void)cp(p);  // the constructor cross-checks the closed form
    detail = "C_3 = " + cp(3).value.get_str();
    return ok;
  });

  criterion(7, "degree placement never contradicted, up to 3 bits", [](std::string& detail) {
    int verified = 0, inconclusive = 0;
    for (int bits = 0; bits <= 3; ++bits)
      for (int mask = 0; mask < (1 << bits); ++mask)
        for (int sq = 0; sq <= 1; ++sq) {
          DegreeQuery query;
          query.squared = sq == 1;
          for (int i = 0; i < bits; ++i)
            query.bits.push_back((mask >> i) & 1);
          VerifyStatus st = verify_degree(grig_level5(), grig_lcs5(), query);
          if (st == VerifyStatus::Contradicted) {
            detail = "contradicted at bits=" + std::to_string(bits) +
                     " mask=" + std::to_string(mask) +
                     " squared=" + std::to_string(sq);
            return false;
          }
          (st == VerifyStatus::Verified ? verified : inconclusive)++;
        }
    detail = std::to_string(verified) + " verified, " +
             std::to_string(inconclusive) + " inconclusive, 0 contradicted";
    return true;
  });

  criterion(8, "integer sequences and the first quotient order", [](std::string& detail) {
    GS3Sequences s = gs3_sequences(40);
    bool ok = s.closed_form_match;
    for (int n = 3; n <= 40; ++n)
      ok = ok && s.alpha[n] == 2 * s.alpha[n - 1] + s.alpha[n - 2] &&
           s.beta[n] == s.beta[n - 1] + s.alpha[n];
    GroupSpec g3 = GroupSpec::gupta_sidki(3);
    FiniteQuotient q2 = enumerate(g3, standard_generators(g3), 2);
    auto lcs = lower_central_series(q2);
    ok = ok && lcs[1].index_in_parent() == 9;  // 3^((3^1+1)/2)
    detail = "gamma_2 index " + std::to_string(lcs[1].index_in_parent());
    return ok;
  });

  criterion(9, "spectral gap inequality and monotone mixing on 20 pairs", [](std::string& detail) {
    GroupSpec g = grig();
    auto w = [&](const GroupSpec& gr, const char* s) {
      return word_from_string(gr, s);
    };
    std::vector<std::vector<GeneratorWord>> grig_sets{
        {w(g, "a"), w(g, "b"), w(g, "c"), w(g, "d")},
        {w(g, "a"), w(g, "b"), w(g, "c")},
        {w(g, "a"), w(g, "b"), w(g, "d")},
        {w(g, "a"), w(g, "c"), w(g, "d")},
        {w(g, "a"), w(g, "a"), w(g, "b"), w(g, "c"), w(g, "d")}};
    int pairs = 0;
    bool ok = true;
    auto check_pair = [&](const FiniteQuotient& q,
                          const std::vector<GeneratorWord>& S) {
      SpectralReport sr = spectral_gap(q, S);
      MixingReport mr = mixing_time(q, S);
      ++pairs;
      if (!(sr.inequality_checked && sr.inequality_holds && mr.monotone)) {
        ok = false;
        detail += "pair " + std::to_string(pairs) + " (order " +
                  std::to_string(q.order()) + ", |S| = " +
                  std::to_string(S.size()) + ") gap " +
                  std::to_string(sr.gap) + " vs bound " +
                  std::to_string(sr.gap_lower_bound) +
                  (mr.monotone ? "" : ", non-monotone walk") + "; ";
      }
    };
    for (int level = 1; level <= 3; ++level) {
      FiniteQuotient q = enumerate(g, standard_generators(g), level);
      for (const auto& S : grig_sets) check_pair(q, S);
    }
    for (int p : {3, 5, 7}) {
      GroupSpec gp = GroupSpec::gupta_sidki(p);
      std::vector<GeneratorWord> S{w(gp, "a"), power(w(gp, "a"), -1),
                                   w(gp, "b"), power(w(gp, "b"), -1)};
      int max_level = p == 3 ? 2 : 1;
      for (int level = 1; level <= max_level; ++level)
        check_pair(enumerate(gp, standard_generators(gp), level), S);
    }
    // The order-2 worked example: gap 2 and mixing time exactly 1.
    FiniteQuotient c2 = enumerate(g, {w(g, "a")}, 1);
    SpectralReport sr = spectral_gap(c2, {w(g, "a")});
    MixingReport mr = mixing_time(c2, {w(g, "a")});
    ++pairs;
    if (std::abs(sr.gap - 2.0) > 1e-12 || mr.time != 1 || !mr.exact) {
      ok = false;
      detail += "order-2 example: gap " + std::to_string(sr.gap) +
                ", mixing time " + std::to_string(mr.time) + "; ";
    }
    detail += std::to_string(pairs) + " (quotient, S) pairs checked";
    return ok && pairs >= 20;
  });

  criterion(10, "growth values and the growth-diameter inequality", [](std::string& detail) {
    auto gens = standard_generators(grig());
    GrowthTable t = growth(grig(), gens, 2);
    bool ok = t.sizes == std::vector<std::uint64_t>{1, 5, 11};
    detail = "f(1) = " + std::to_string(t.sizes[1]) +
             ", f(2) = " + std::to_string(t.sizes[2]);
    for (int level = 1; level <= 4; ++level) {
      GrowthDiameterCheck c = growth_diameter_check(grig(), gens, level);
      detail += "; level " + std::to_string(level) + ": f(" +
                std::to_string(c.diameter) + ") = " +
                std::to_string(c.ball_size) +
                " >= " + std::to_string(c.quotient_order);
      ok = c.holds && ok;
    }
    return ok;
  });

  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
