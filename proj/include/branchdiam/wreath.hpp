#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "branchdiam/words.hpp"

namespace branchdiam {

// Default memory guard: at most this many tree leaves per permutation.
inline constexpr std::uint64_t kDefaultMaxLeaves = 1u << 24;
// Default recursion guard for the Gupta-Sidki word problem.
inline constexpr int kDefaultDepthGuard = 64;

// Wreath decomposition of a word: the root permutation of the alphabet and
// one reduced section word per child subtree.
struct Section {
  std::vector<int> root;           // permutation of {0..p-1}; root[x] = x's image
  std::vector<GeneratorWord> children;
};

// The permutation a word induces on the p^n level-n vertices. Vertex words
// w_1..w_n are encoded as integers sum w_i * p^(n-i) (first letter = most
// significant digit).
struct LevelPermutation {
  int prime = 2;
  int level = 0;
  std::vector<std::uint32_t> perm;  // size p^level; perm[v] = image of v

  bool is_identity() const;
  bool operator==(const LevelPermutation&) const = default;
  // One-line CSV of the image indices, used by golden tests.
  std::string csv() const;
};

// Composition under the project-wide convention: (u then v), i.e.
// result[i] = v.perm[u.perm[i]].
LevelPermutation compose(const LevelPermutation& u, const LevelPermutation& v);
LevelPermutation inverse(const LevelPermutation& u);
LevelPermutation identity_perm(int prime, int level);

Section decompose(const GeneratorWord& w);
LevelPermutation level_permutation(const GeneratorWord& w, int n,
                                   std::uint64_t max_leaves = kDefaultMaxLeaves);
bool in_stab(const GeneratorWord& w, int n,
             std::uint64_t max_leaves = kDefaultMaxLeaves);

// Solves the word problem. Grigorchuk: exact via the contraction of section
// lengths (sections of a length-L word have length <= ceil((L+1)/2)).
// Gupta-Sidki: section recursion behind a depth guard; throws UndecidedError
// when the guard is hit, never answers wrongly.
bool is_identity(const GeneratorWord& w, int depth_guard = kDefaultDepthGuard);

// True iff w acts trivially on every vertex of the first n levels, decided by
// section recursion with genuine root-permutation composition and no modular
// exponent normalization. Unlike level_permutation this never materializes
// the p^n vertex array, so it stays cheap at depths where the permutation
// would not fit in memory, and unlike reduce() it does not assume the
// generator-order relations it is typically used to check.
bool acts_trivially(const GeneratorWord& w, int n);

// A finitely supported tree automorphism given as a product of factors, each
// either a word or an explicit p-tuple of child elements (root-trivial).
// This represents elements like (x,1) or (x^-1,1,1,(1,x^-1)x) that the
// commutator identities use without requiring a word realization.
class Elem;
using ElemTuple = std::vector<Elem>;  // exactly p entries

class Elem {
 public:
  using Factor = std::variant<GeneratorWord, ElemTuple>;

  explicit Elem(GroupSpec g) : group_(g) {}
  explicit Elem(GeneratorWord w) : group_(w.group()) {
    factors_.push_back(std::move(w));
  }
  Elem(GroupSpec g, std::vector<Factor> fs)
      : group_(g), factors_(std::move(fs)) {}

  static Elem tuple(GroupSpec g, ElemTuple entries);

  const GroupSpec& group() const { return group_; }
  const std::vector<Factor>& factors() const { return factors_; }

  Elem operator*(const Elem& rhs) const;
  Elem inv() const;

  // Root permutation on the alphabet and the p section elements.
  std::vector<int> root() const;
  std::vector<Elem> sections() const;

  // The word this element flattens to, if no tuple factor remains after
  // multiplying out. Tuple factors block flattening at the top level but
  // their entries surface as sections one level down.
  std::optional<GeneratorWord> as_word() const;

  LevelPermutation level_perm(int n,
                              std::uint64_t max_leaves = kDefaultMaxLeaves) const;

 private:
  GroupSpec group_;
  std::vector<Factor> factors_;
};

// Sections of an Elem flattened to words; throws InconsistencyError if some
// section still contains a tuple deeper than the element's support.
std::vector<GeneratorWord> section_words(const Elem& e);

}  // namespace branchdiam
