#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

#include "branchdiam/quotient.hpp"
#include "branchdiam/words.hpp"
#include "branchdiam/wreath.hpp"

namespace branchdiam {

// The branch generator x = abab, with level-1 sections (ca, ac).
GeneratorWord grig_x();

// A word L(w) with trivial root action whose first level-1 section is w
// (letterwise: a -> b, b -> ada, c -> aba, d -> aca). Used to push
// conjugators down the branch embedding.
GeneratorWord grig_lift(const GeneratorWord& w);

// A query for the iterated embedding X_1...X_n(base) where each X_i is one
// of the maps zero(g) = (g,1) and one(g) = (g,g^-1); bits[i-1] = 1 selects
// the "one" map for X_i, and X_1 is the outermost map.
struct DegreeQuery {
  bool squared = false;   // base is x when false, x^2 when true
  std::vector<int> bits;  // X_1..X_n, each 0 or 1
};

// An explicit word realizing X_1...X_n(base), built from conjugated powers
// of x through the branch embedding of K into K x K.
GeneratorWord branch_embed(const DegreeQuery& q);

// 1 + sum X_i 2^(i-1) + 2^n for base x, with 2^(n+1) instead for base x^2.
long long degree_formula(const DegreeQuery& q);

enum class VerifyStatus { Verified, Inconclusive, Contradicted };

// Places the image of branch_embed(query) in the lower central series of the
// enumerated quotient and compares with degree_formula: equal depth is
// Verified, image vanishing deeper than the formula (quotient too shallow to
// separate) is Inconclusive, shallower placement is Contradicted.
VerifyStatus verify_degree(const FiniteQuotient& q,
                           const std::vector<SubgroupHandle>& lcs,
                           const DegreeQuery& query);

// The four commutator identities relating x-powers to branch tuples, checked
// exactly as level-n permutations. idx is 1..4:
//   1: [x,(x,1)]      = (x^-1,1,1,1)
//   2: [x,(x,x)]      = (x^-1,1,1,(1,x^-1)x)
//   3: [x^2,(x,1)]    = (x^-1,x,1,1)
//   4: [x^2,(x,x^-1)] = (x^-1,x,(x^-1,1)x^-1,(1,x^-1)x)
bool verify_identity_lemma(int idx, int level);

// Generator relation suite (a^2 = b^2 = c^2 = d^2 = 1 and the Klein-four
// products of b, c, d) verified as trivial actions on all levels <= n,
// without assuming the relations in the reduction machinery.
bool verify_relations(int max_level);

// Image in q of the branch power K^(x 2^m): the normal closure of the
// m-fold zero-embedding of x. m = 0 gives K itself.
SubgroupHandle grig_K_image(const FiniteQuotient& q, int m);

// Checks that squaring maps the image of K^(x 2^(m-1)) onto every coset of
// gamma_{2^m+1} / K^(x 2^m) inside q (m = 1 or 2). Throws UndecidedError if
// the K-power image in q does not have its stable index, so the quotient is
// too shallow to decide.
bool verify_squaring(const FiniteQuotient& q,
                     const std::vector<SubgroupHandle>& lcs, int m);

struct SKReport {
  int exponent = 0;            // minimal e with X^e covering the quotient
  int bound = 0;               // the asserted constant
  bool within_bound = false;   // exponent <= bound
  std::uint64_t group_order = 0;
  std::size_t cover_size = 0;  // number of distinct cosets in X
  CoverWitness witness;        // per-coset shortest X-factorizations
};

// Minimal-radius standard-generator ball whose image covers q modulo the
// given subgroup, returned as explicit words (shortest representatives,
// one per covered element of q/working). Distances are measured in
// q/working, which equals the ball image for any quotient.
std::vector<GeneratorWord> covering_ball(const FiniteQuotient& q,
                                         const SubgroupHandle& working,
                                         const SubgroupHandle& target,
                                         int* radius_out = nullptr);

// The cover-growth step: given symmetric X with X gamma_{2^m+1} full,
// computes the minimal e with X^e covering q/gamma_{2^(m+1)+1} and checks
// e <= 35. Requires the gamma_{2^(m+1)+1} index in q to match the closed
// form 2^(2^m * 3 + 2); aborts with InconsistencyError otherwise.
SKReport sk_step_verify(const FiniteQuotient& q,
                        const std::vector<SubgroupHandle>& lcs, int m,
                        const std::vector<GeneratorWord>& X);

struct CtildeResult {
  int value = 0;
  bool worst_case = false;  // false = standard-generator fallback
};

// The base constant of the diameter bound: the worst-case diameter of the
// order-256 quotient q/gamma_5 over all symmetric generating sets, falling
// back to the standard-generator diameter if the search budget is exceeded.
CtildeResult grig_ctilde(const FiniteQuotient& q,
                         const std::vector<SubgroupHandle>& lcs);

// ctilde * 35^(m-2) with m minimal such that n <= 2^m + 1; ctilde for n <= 5.
mpz_class diameter_bound(long long n, long long ctilde);

}  // namespace branchdiam
