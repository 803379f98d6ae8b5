#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "branchdiam/wreath.hpp"
#include "branchdiam/words.hpp"

namespace branchdiam {

inline constexpr std::uint64_t kDefaultMaxElements = 1u << 24;

// A fully enumerated image of the group on level n: an indexed table of
// bit-packed level permutations (ceil(log2 p^n) bits per image entry, 64-bit
// hash index), closed under composition and inverse, identity at index 0.
// Immutable after construction.
class FiniteQuotient {
 public:
  FiniteQuotient(GroupSpec group, int level,
                 std::vector<GeneratorWord> gen_words);

  const GroupSpec& group() const { return group_; }
  int level() const { return level_; }
  std::uint64_t npoints() const { return npoints_; }
  std::uint64_t order() const { return count_; }
  const std::vector<GeneratorWord>& generator_words() const {
    return gen_words_;
  }
  const std::vector<std::uint32_t>& generator_indices() const {
    return gen_index_;
  }

  std::uint32_t identity() const { return 0; }
  std::uint32_t mul(std::uint32_t i, std::uint32_t j) const;
  std::uint32_t inv(std::uint32_t i) const;
  std::optional<std::uint32_t> index_of(const LevelPermutation& p) const;
  LevelPermutation perm_of(std::uint32_t i) const;

  // Serialization for the quotient cache.
  void save(const std::string& path) const;
  static FiniteQuotient load(const std::string& path);

 private:
  friend FiniteQuotient enumerate(GroupSpec, const std::vector<GeneratorWord>&,
                                  int, std::uint64_t, std::uint64_t);

  // Packed-permutation arena.
  std::uint32_t image_at(std::uint64_t elem, std::uint64_t point) const;
  void pack_into(std::uint64_t elem, const std::vector<std::uint32_t>& images);
  std::uint64_t hash_of(std::uint64_t elem) const;
  bool equal_elems(std::uint64_t i, const std::vector<std::uint64_t>& buf) const;
  // Open-addressing index over the arena.
  void rehash(std::uint64_t min_slots);
  // Returns the existing index or inserts the packed candidate buffer.
  std::pair<std::uint32_t, bool> find_or_insert(
      const std::vector<std::uint64_t>& packed);
  std::optional<std::uint32_t> find_packed(
      const std::vector<std::uint64_t>& packed) const;

  GroupSpec group_;
  int level_;
  std::uint64_t npoints_;
  int bits_;
  std::uint64_t words_per_elem_;
  std::vector<std::uint64_t> arena_;
  std::uint64_t count_ = 0;
  std::vector<std::uint32_t> slots_;  // open addressing; index+1, 0 = empty
  std::uint64_t slot_mask_ = 0;
  std::vector<GeneratorWord> gen_words_;
  std::vector<std::uint32_t> gen_index_;
};

// Breadth-first closure of the generator images at level n, with
// deterministic indexing: discovery order by BFS level, ties broken by
// packed-buffer lexicographic order.
FiniteQuotient enumerate(GroupSpec group,
                         const std::vector<GeneratorWord>& gens, int n,
                         std::uint64_t max_elements = kDefaultMaxElements,
                         std::uint64_t max_leaves = kDefaultMaxLeaves);

// A subgroup of an enumerated quotient: membership bitmask, element list in
// discovery order, and the generator indices it was built from.
struct SubgroupHandle {
  const FiniteQuotient* parent = nullptr;
  std::vector<bool> member;
  std::vector<std::uint32_t> elements;
  std::vector<std::uint32_t> gens;

  std::uint64_t order() const { return elements.size(); }
  std::uint64_t index_in_parent() const {
    return parent->order() / order();
  }
  bool contains(std::uint32_t i) const { return member[i]; }
  bool contains_subgroup(const SubgroupHandle& other) const;
  bool is_trivial() const { return elements.size() == 1; }
};

SubgroupHandle whole_group(const FiniteQuotient& q);
SubgroupHandle subgroup_from_indices(const FiniteQuotient& q,
                                     std::vector<std::uint32_t> gens);
// Maps the given words into q and closes; throws InconsistencyError if an
// image permutation is missing from q.
SubgroupHandle subgroup_image(const FiniteQuotient& q,
                              const std::vector<GeneratorWord>& subgens);
// Smallest normal subgroup of q containing the given elements.
SubgroupHandle normal_closure(const FiniteQuotient& q,
                              std::vector<std::uint32_t> seed);
// gamma_1 = q, gamma_{i+1} = <[g,h] : g generator of q, h generator of
// gamma_i>^q, down to the trivial group.
std::vector<SubgroupHandle> lower_central_series(const FiniteQuotient& q);

// Exact Cayley-graph diameter with ball sizes per radius. Generators are
// given as element indices and must already be symmetrized.
struct DiameterResult {
  int diameter = 0;
  std::vector<std::uint64_t> ball_sizes;  // ball_sizes[r] = |B(r)|
};
DiameterResult diameter(const FiniteQuotient& q,
                        const std::vector<std::uint32_t>& gen_indices);
// Convenience: symmetrizes S, maps into q (throws NonGeneratingError if the
// images do not generate).
DiameterResult diameter_words(const FiniteQuotient& q,
                              const std::vector<GeneratorWord>& S);
// Symmetrize a generator index set inside q (adds inverses, dedupes).
std::vector<std::uint32_t> symmetrize(const FiniteQuotient& q,
                                      std::vector<std::uint32_t> gens);

// Max diameter over all symmetric generating sets. Exact for p-groups via
// the Burnside basis theorem: only minimal symmetric generating sets matter
// (supersets never increase the diameter), and those are one inverse-closed
// atom per basis vector of G/Phi(G). Throws CapExceededError when the order
// cap or the candidate-set budget is exceeded.
int worst_case_diameter(const FiniteQuotient& q,
                        std::uint64_t order_cap = 512,
                        std::uint64_t set_budget = 2'000'000);
// Same computation on a coset quotient; gen_cosets must generate it.
class CosetGroup;
int worst_case_diameter(const CosetGroup& G,
                        const std::vector<std::uint32_t>& gen_cosets,
                        std::uint64_t order_cap = 512,
                        std::uint64_t set_budget = 2'000'000);

// Index-stabilization detection across levels.
struct StabilizationReport {
  std::string quantity;
  std::vector<std::pair<int, std::uint64_t>> values;  // (level, value)
  bool stabilized = false;
  std::uint64_t stable_value = 0;
};
StabilizationReport stabilized_index(
    GroupSpec group, const std::vector<GeneratorWord>& subgens, int n_min,
    int n_max, bool use_normal_closure = false,
    std::uint64_t max_elements = kDefaultMaxElements);

// The finite group of cosets q/N for a normal subgroup N, with
// multiplication through canonical (minimal-index) representatives.
class CosetGroup {
 public:
  CosetGroup(const FiniteQuotient& q, const SubgroupHandle& N);

  std::uint64_t order() const { return reps_.size(); }
  std::uint32_t identity() const { return 0; }
  std::uint32_t coset_of(std::uint32_t parent_index) const {
    return coset_id_[parent_index];
  }
  std::uint32_t rep(std::uint32_t coset) const { return reps_[coset]; }
  std::uint32_t mul(std::uint32_t c1, std::uint32_t c2) const {
    return coset_id_[parent_->mul(reps_[c1], reps_[c2])];
  }
  std::uint32_t inv(std::uint32_t c) const {
    return coset_id_[parent_->inv(reps_[c])];
  }
  const FiniteQuotient& parent() const { return *parent_; }

 private:
  const FiniteQuotient* parent_;
  std::vector<std::uint32_t> coset_id_;
  std::vector<std::uint32_t> reps_;
};

// Minimal e such that X^e covers the whole group, where X is a set of coset
// indices containing the identity (BFS eccentricity over the X-labeled
// Cayley graph). Throws PreconditionError if X does not generate.
int covering_exponent(const CosetGroup& G, const std::vector<std::uint32_t>& X);

// Same BFS, but also records a covering witness per coset: parent[c] is the
// previous coset on a shortest X-product reaching c, edge[c] the index into X
// of the final factor. Identity has parent == itself, edge == -1.
struct CoverWitness {
  int exponent = 0;
  std::vector<std::int32_t> dist;
  std::vector<std::uint32_t> parent;
  std::vector<std::int32_t> edge;
  // The X-index sequence whose product reaches the coset.
  std::vector<int> factor_sequence(std::uint32_t coset) const;
};
CoverWitness covering_exponent_witnessed(const CosetGroup& G,
                                         const std::vector<std::uint32_t>& X);

}  // namespace branchdiam
