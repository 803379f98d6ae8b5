#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "branchdiam/grigorchuk.hpp"
#include "branchdiam/quotient.hpp"
#include "branchdiam/words.hpp"
#include "branchdiam/wreath.hpp"

namespace branchdiam {

// The commutator chain x_1 = [a,b], x_{i+1} = [a, x_i], returned as the
// explicit words x_1..x_{p-1}. Their classes form a basis of K / K^(x p).
std::vector<GeneratorWord> x_chain(int p);

// The tuple j(g) = (g^{alpha_1}, ..., g^{alpha_p}) with
// alpha_i = (-1)^(i+1) * binomial(j, i-1), so entries are trivial for
// i > j+1. The exponents are kept as true integers, not residues: g need
// not have order p, and the recursion (j+1)(g) = [a, j(g)] is exact only
// with the integer exponents. Coordinate tests reduce them mod p.
struct BoldMap {
  int j = 0;
  GeneratorWord base;
  std::vector<long long> alpha;  // size p, signed binomial exponents
  Elem element;            // the tuple itself
  // A realizing word, present when one is known for j = 0 (the p >= 7
  // commutator identity provides [x_1^(a^-2), x_1^a] for base x_1) and then
  // propagated through the recursion.
  std::optional<GeneratorWord> word;

  BoldMap() : element(GroupSpec::grigorchuk()) {}
};
BoldMap bold(int j, const GeneratorWord& g);

// Names in the subgroup lattice used by the membership tests.
//   K          = [Gamma, Gamma]
//   Kpow(m)    = K^(x p^m), the m-fold branch power (Kpow(0) = K)
//   L(i)       = <x_i, ..., x_{p-1}, K^(x p)>, 1 <= i <= p, L(1) = K,
//                L(p) = Kpow(1)
//   Lpow(i,m)  = L(i)^(x p^m)
//   Kbold(i,m) = (<i(x_1), ..., (p-1)(x_1), Lpow(2,1)>)^(x p^(m-1)),
//                0 <= i <= p, Kbold(0,m) = Kpow(m), Kbold(p,m) = Lpow(2,m)
//   Stab(n)    = the level-n stabilizer
struct SubgroupName {
  enum class Tag { K, Kpow, L, Lpow, Kbold, Stab } tag = Tag::K;
  int i = 0;
  int m = 0;

  static SubgroupName K() { return {Tag::K, 0, 0}; }
  static SubgroupName Kpow(int m) { return {Tag::Kpow, 0, m}; }
  static SubgroupName L(int i) { return {Tag::L, i, 0}; }
  static SubgroupName Lpow(int i, int m) { return {Tag::Lpow, i, m}; }
  static SubgroupName Kbold(int i, int m) { return {Tag::Kbold, i, m}; }
  static SubgroupName Stab(int n) { return {Tag::Stab, 0, n}; }
  std::string str() const;
};

// Hierarchical membership through section recursion and abelianization,
// never through quotient enumeration: K is the kernel of both exponent
// sums, branch powers recurse over sections, and the L / Kbold layers are
// decided by coordinates over the x-basis (elements outside the ambient
// layer simply test false). Throws PreconditionError for out-of-range
// subscripts and UnsupportedOperationError for non-Gupta-Sidki elements.
bool member(const SubgroupName& name, const Elem& e);
bool member(const SubgroupName& name, const GeneratorWord& w);

// Coordinates of e in K / K^(x p) over the basis x_1..x_{p-1}: the unique
// (lambda_j) with e * x_1^-lambda_1 * ... * x_{p-1}^-lambda_{p-1} in
// K^(x p), found by exhaustive search over the p^(p-1) exponent tuples with
// Kpow(1)-membership as the test (a linear-algebra prediction over the
// abelianized sections is tried first to order the search). Throws
// PreconditionError if e is not in K and InconsistencyError if no exponent
// tuple passes. p = 7 searches ~118k tuples; pass allow_large = true to
// permit it.
std::vector<int> x_coordinates(const Elem& e, bool allow_large = false);

// Identity test for tuple-built elements: trivial root permutation at every
// level of the tuple support, then the word problem on the residual section
// words.
bool elem_is_identity(const Elem& e, int depth_guard = kDefaultDepthGuard);

// The p-dependent commutator identities feeding the cover-growth step. Each
// applies to exactly one residue of p:
//   ZeroAsCommutator (p >= 7): 0(x_1) = [x_1^(a^-2), x_1^a], checked exactly
//     as level-n permutations.
//   SquareCongruence (p = 5): [x_1, x_1^a] = (x_1, aba^-2b^-1a, 1, 1, 1)
//     exactly, aba^-2b^-1a * x_1^-1 in L(2), and [x_1, x_1^a] * 0(x_1)^-2
//     in Kbold(1,1). The section identity is true but the two congruences
//     are not: the middle word has x-coordinates (2,1,1,1), so the
//     commutator matches 0(x_1)^3, not 0(x_1)^2. This check therefore
//     returns false; the corrected congruence is pinned in the tests.
//   SectionCongruence (p = 3): [b, x_1] * (x_1^-1, 1, x_1^-1)^-1 in
//     Lpow(2,1), and [b, x_1] * 0(x_1)^-1 in Kbold(1,1).
enum class GSIdentity { ZeroAsCommutator, SquareCongruence, SectionCongruence };
bool verify_gs_identity(GSIdentity name, int p, int level = 3);

// Generator orders a^p = b^p = 1 as trivial actions on all levels <= n.
bool gs_verify_relations(int p, int max_level);

// The covering constant: a-sequence a_0 = 4, a_n = 2a_{n-1} + 2; b-sequence
// b_1 = sum of the a_n, b_{n+1} = 2b_n + 2; value = 1 + sum of the b_i,
// cross-checked against the closed form 3*4^p - 2^p (p+8) + 7 (throws
// InconsistencyError on mismatch).
struct CpConstant {
  int p = 0;
  std::vector<mpz_class> a;  // a_0..a_{p-1}
  std::vector<mpz_class> b;  // b_1..b_{p-1}
  mpz_class value;
};
CpConstant cp(int p);

// The finite quotient Gamma / K^(x p^m), enumerated through injective coset
// signatures: the level-m permutation together with the exponent-sum pair of
// every level-m section. Two elements share a signature exactly when they
// differ by an element of Stab(m) all of whose level-m sections lie in K,
// which is K^(x p^m). No level stabilizer is contained in K^(x p^m), so
// level permutations alone could not separate these cosets.
class KpowQuotient {
 public:
  KpowQuotient(int p, int m, std::uint64_t max_elements = 1u << 21);

  int prime() const { return p_; }
  int depth() const { return m_; }
  std::uint64_t order() const { return reps_.size(); }
  std::uint32_t identity() const { return 0; }
  const GeneratorWord& rep(std::uint32_t c) const { return reps_[c]; }
  // Length of the longest shortest representative (the standard-generator
  // eccentricity of the identity, hence the diameter witness radius).
  int radius() const { return radius_; }

  std::uint32_t coset_of(const GeneratorWord& w) const;
  // Right multiplication by a word, letter by letter through the
  // generator-transition table.
  std::uint32_t mul_word(std::uint32_t c, const GeneratorWord& w) const;
  std::uint32_t inv(std::uint32_t c) const;

 private:
  std::string signature(const GeneratorWord& w) const;

  int p_;
  int m_;
  std::vector<GeneratorWord> reps_;
  std::vector<std::array<std::uint32_t, 4>> trans_;  // edges a, a^-1, b, b^-1
  std::unordered_map<std::string, std::uint32_t> index_;
  int radius_ = 0;
};

// Shortest-word representatives of every coset of Gamma_(p) / K^(x p), i.e.
// a minimal-radius standard-generator ball covering the quotient.
std::vector<GeneratorWord> gs_covering_ball(int p, int* radius_out = nullptr);

// Full-coverage cover-growth step, p = 3 and m = 1 only: requires symmetric
// X with X K^(x 3) = Gamma (PreconditionError otherwise), computes the
// minimal e with X^e covering Gamma / K^(x 9) (order 3^10) and checks
// e <= C_3 = 111. Larger (p, m) are out of enumeration reach; use
// gs_component_chains for those.
SKReport sk_step_verify_gs(int p, int m, const std::vector<GeneratorWord>& X);

// Component verification of the three inclusion chains behind the
// cover-growth step, on seeded samples of coset representatives built from
// the x-basis:
//   step 1: K^(x p)        <= X^4     Kbold(1,1)   via the p-specific
//           commutator identity on 0(x_1)^lambda,
//   step 2: Kbold(i,1)     <= X^(a_i) Kbold(i+1,1) via
//           [a y_j, i(x_1)^lambda] == [a, i(x_1)^lambda] mod Kbold(i+2,1)
//           with x_{p-2} = (a y_1, ..., a y_p), plus the exact tuple
//           identity ((i+1)(x_1)^lambda_j)_j = [(a)_j, (i(x_1)^lambda_j)_j],
//   step 3: Lpow(i,1)      <= X^(b_i) Lpow(i+1,1)  via
//           [x_{p-2}, (x_i^lambda_j)_j] == (x_{i+1}^lambda_j)_j mod Kpow(2).
struct GSChainReport {
  int p = 0;
  std::uint64_t seed = 0;
  int step1_checked = 0, step1_failures = 0;
  int step2_checked = 0, step2_failures = 0;
  int step3_checked = 0, step3_failures = 0;
  bool exact_tuple_identity = false;
  bool all_ok() const {
    return step1_failures == 0 && step2_failures == 0 && step3_failures == 0 &&
           step1_checked > 0 && step2_checked > 0 && step3_checked > 0 &&
           exact_tuple_identity;
  }
};
GSChainReport gs_component_chains(int p, int samples_per_step = 200,
                                  std::uint64_t seed = 12345);

// Arithmetic index bounds for Gamma_(p), with enumeration cross-checks when
// the level is in reach. printed_bound is p^((p-2)(p^(n-1)-1)+1);
// stepwise_bound telescopes the per-level estimate
// |Stab(m) : Stab(m+1)| >= p^((p-2)(p^(m-1)-1)) into
// p^(1 + (p-2) * sum_{m=1}^{n-1} (p^(m-1)-1)). The two disagree for n >= 3,
// and only the stepwise form is a valid lower bound: at p = 3, n = 3 the
// enumerated index is 3^7 = 2187 < 3^9. kpow_index is the exact
// p^(p^n + 1).
struct GSIndexBounds {
  int p = 0, n = 0;
  mpz_class printed_bound;
  mpz_class stepwise_bound;
  mpz_class kpow_index;
  std::optional<mpz_class> enumerated_stab_index;
  std::optional<bool> printed_bound_holds;
  std::optional<bool> stepwise_bound_holds;
};
GSIndexBounds gs_index_bounds(int p, int n,
                              std::uint64_t max_elements = 1u << 22);

// The integer sequences alpha_1 = 1, alpha_2 = 2,
// alpha_n = 2 alpha_{n-1} + alpha_{n-2}, beta_n = alpha_1 + ... + alpha_n,
// with the Pell closed forms alpha_n = ((1+sqrt2)^n - (1-sqrt2)^n)/(2 sqrt2)
// and beta_n = ((1+sqrt2)^(n+1) + (1-sqrt2)^(n+1) - 2)/4 reproduced by
// rounding extended-precision floats.
struct GS3Sequences {
  std::vector<long long> alpha;  // alpha[n] for 1 <= n <= N; alpha[0] = 0
  std::vector<long long> beta;
  bool closed_form_match = false;
};
GS3Sequences gs3_sequences(int N);

// Enumerated checks on the Gupta-Sidki 3-group lower central series:
// |Gamma / gamma_{beta_1+1}| = |Gamma / gamma_2| = 3^2 (index stable across
// levels 2 and 3), the containment K^(x 3) <= gamma_3 as an image
// containment in the level-3 quotient, and the gamma_{beta_2+1} = gamma_4
// image index at level 3 against the predicted 3^5 (an image index only;
// the level-3 quotient cannot certify it from above). The m = 2 containment
// K^(x 9) <= gamma_6 is unset: every element of K^(x 9) already acts
// trivially on three levels, so its image in the deepest enumerable
// quotient is the identity and the check would be vacuous.
struct GS3IndexChecks {
  std::uint64_t gamma2_index = 0;
  bool idx_m1_ok = false;
  bool containment_m1 = false;
  std::optional<bool> containment_m2;
  std::uint64_t gamma4_index_level3 = 0;
  bool idx_m2_image_matches = false;
};
GS3IndexChecks gs3_index_checks();

}  // namespace branchdiam
