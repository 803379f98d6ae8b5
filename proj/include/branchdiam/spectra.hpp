#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "branchdiam/quotient.hpp"
#include "branchdiam/words.hpp"

namespace branchdiam {

// The normalized adjacency operator A_S of the Cayley graph of (q, S).
// S is a symmetric multiset of generator words: repeated generators and
// generators acting trivially in q contribute parallel edges and loops, so
// A_S is row-stochastic and symmetric with spectrum in [-1, 1].
class CayleyOperator {
 public:
  // Throws PreconditionError if the image multiset is not inverse-closed.
  CayleyOperator(const FiniteQuotient& q, const std::vector<GeneratorWord>& S);

  const FiniteQuotient& quotient() const { return *q_; }
  // Generator images with multiplicity (the multiset S mapped into q).
  const std::vector<std::uint32_t>& gen_indices() const { return gens_; }
  std::size_t degree() const { return gens_.size(); }
  // Whether the images of S generate q.
  bool generating() const { return generating_; }
  std::uint64_t order() const { return q_->order(); }

  // y = A_S x: averages x over the degree() neighbors of each vertex.
  void apply(const std::vector<double>& x, std::vector<double>& y) const;
  // Neighbor of vertex v along the k-th element of the multiset.
  std::uint32_t neighbor(std::uint32_t v, std::size_t k) const {
    return nbr_[static_cast<std::size_t>(v) * gens_.size() + k];
  }

 private:
  const FiniteQuotient* q_;
  std::vector<std::uint32_t> gens_;
  std::vector<std::uint32_t> nbr_;  // order x degree neighbor table
  bool generating_ = false;
};

// One step of the lazy random walk: the distribution f_l over q after l
// applications of T_S = (A_S + I)/2, starting from f_0 = point mass at the
// identity.
struct WalkState {
  long long step = 0;
  std::vector<double> dist;
};

// Exact ball sizes |B_S(r)| for r = 0..n. level_used = 0 means the
// word-problem backend decided every equality exactly; level_used = N > 0
// means elements were compared as level-N permutations (with N raised until
// the table stabilized).
struct GrowthTable {
  std::vector<std::uint64_t> sizes;
  int level_used = 0;
};

struct SpectralReport {
  double lambda2 = 1.0;
  double gap = 0.0;            // 1 - lambda2
  bool generating = false;
  bool dense = false;          // dense eigensolve (else power iteration)
  int diameter = 0;            // diam(q, S); 0 when S does not generate
  double gap_lower_bound = 0.0;    // 1 / (|S| * diameter^2)
  bool inequality_checked = false;
  bool inequality_holds = false;  // gap >= gap_lower_bound
  std::string warning;            // nonempty when S does not generate
  // Full spectrum (ascending) when the dense backend ran; empty otherwise.
  std::vector<double> eigenvalues;
};

// Spectral gap 1 - lambda_2 of A_S. Dense symmetric eigensolve when
// |q| <= 4096, else deflated power iteration on (A_S + I)/2 to relative
// tolerance 1e-10. When S generates, also computes diam(q, S) and checks
// gap >= (|S| * diam^2)^-1; when it does not, reports lambda_2 = 1 with a
// warning and skips the inequality.
SpectralReport spectral_gap(const FiniteQuotient& q,
                            const std::vector<GeneratorWord>& S);

struct MixingReport {
  long long time = 0;   // smallest positive l with ||f_l - u||_inf <= 1/(2|q|)
  bool exact = false;   // integer-arithmetic backend (|q| <= 4096)
  bool monotone = true; // inf-distance non-increasing over the observed steps
  // inf-distance to uniform at steps 0..time (double approximations).
  std::vector<double> trace;
};

// Lazy-walk mixing time: first positive l with ||f_l - (1/|q|)chi||_inf
// <= 1/(2|q|). Exact integer numerators over (2|S|)^l when |q| <= 4096;
// double precision with a tracked rounding bound added to the threshold
// comparison above. The trivial group mixes at the smallest *positive*
// step, so it returns 1. Throws UndecidedError past max_iter and
// InconsistencyError if the inf-distance ever increases.
MixingReport mixing_time(const FiniteQuotient& q,
                         const std::vector<GeneratorWord>& S,
                         long long max_iter = 10'000'000);

// Ball sizes of (group, S) out to radius n in the infinite group, via BFS
// with word-problem-backed equality (candidates are bucketed by their
// level-hash_level permutation, then confirmed with the exact word problem;
// the bucket level only affects speed, never correctness). Throws
// UndecidedError naming the offending pair if the word problem's recursion
// guard is hit.
GrowthTable growth(GroupSpec group, const std::vector<GeneratorWord>& S,
                   int n, int hash_level = 5);

// The fallback backend: compare elements as level-N permutations only,
// raising N from start_level until two consecutive levels give the same
// table, and report the N used. Throws UndecidedError if max_level is
// reached without stabilizing.
GrowthTable growth_stabilized(GroupSpec group,
                              const std::vector<GeneratorWord>& S, int n,
                              int start_level = 2, int max_level = 12);

struct GrowthDiameterCheck {
  int level = 0;                    // n with F = G/Stab(n)
  std::uint64_t quotient_order = 0; // |F|
  int diameter = 0;                 // D = diam(F, phi(S))
  std::uint64_t ball_size = 0;      // f_(G,S)(D)
  bool holds = false;               // ball_size >= quotient_order
};

// The growth-diameter inequality f_(G,S)(diam(F, phi(S))) >= |F| for the
// level-n quotient F = G/Stab(n).
GrowthDiameterCheck growth_diameter_check(GroupSpec group,
                                          const std::vector<GeneratorWord>& S,
                                          int level);

struct GrowthExponentReport {
  double eta = 0.0;               // real root of X^3 + X^2 + X = 2 in (0,1)
  double beta = 0.0;              // log 2 / (log 2 - log eta)
  double grig_beta_lower = 0.0;   // log 2 / log 35
  double log35_over_log2 = 0.0;   // log 35 / log 2
};

// Constants report: eta by bisection to 1e-12 and the derived exponents.
GrowthExponentReport growth_exponent_report();

}  // namespace branchdiam
