#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "branchdiam/errors.hpp"

namespace branchdiam {

enum class Family { Grigorchuk, GuptaSidki };

// A named self-similar group: the Grigorchuk 2-group or a Gupta-Sidki
// p-group. The alphabet size of the rooted tree equals the prime.
struct GroupSpec {
  Family family;
  int prime;  // 2 for Grigorchuk, an odd prime for Gupta-Sidki

  static GroupSpec grigorchuk() { return {Family::Grigorchuk, 2}; }
  static GroupSpec gupta_sidki(int p);

  int alphabet_size() const { return prime; }
  bool operator==(const GroupSpec&) const = default;
  std::string name() const;
  // Parses "grigorchuk" | "gupta-sidki:p=<odd prime>".
  static GroupSpec parse(std::string_view s);
};

// One run-length-encoded letter: a generator symbol with a nonzero exponent.
struct Letter {
  char symbol;   // 'a'..'d' (Grigorchuk) or 'a','b' (Gupta-Sidki)
  int exponent;  // nonzero; +-1 for Grigorchuk, 1..p-1 canonically for GS
  bool operator==(const Letter&) const = default;
};

// A word in the group's generators, stored run-length encoded. Words are
// immutable values; all operations return new words.
class GeneratorWord {
 public:
  GeneratorWord() : group_(GroupSpec::grigorchuk()) {}
  explicit GeneratorWord(GroupSpec g) : group_(g) {}
  GeneratorWord(GroupSpec g, std::vector<Letter> letters);

  const GroupSpec& group() const { return group_; }
  const std::vector<Letter>& letters() const { return letters_; }
  bool empty() const { return letters_.empty(); }
  // Total letter count with multiplicity (sum of |exponent|).
  std::size_t length() const;

  bool operator==(const GeneratorWord&) const = default;

  std::string str() const;

 private:
  GroupSpec group_;
  std::vector<Letter> letters_;  // reduced or not; see reduce()
};

// Rewrites w into the canonical reduced form: exponents normalized by the
// generator orders, adjacent equal symbols merged, and (Grigorchuk only)
// adjacent {b,c,d} pairs collapsed via the Klein four-group relations
// bc=cb=d, cd=dc=b, bd=db=c. Idempotent.
GeneratorWord reduce(const GeneratorWord& w);

// Word constructors and combinators (results are reduced).
GeneratorWord word_from_string(GroupSpec g, std::string_view text);
GeneratorWord concat(const GeneratorWord& u, const GeneratorWord& v);
GeneratorWord inverse(const GeneratorWord& w);
GeneratorWord power(const GeneratorWord& w, long long k);
// g^-1 * w * g
GeneratorWord conjugate(const GeneratorWord& w, const GeneratorWord& g);
// [u,v] = u^-1 v^-1 u v
GeneratorWord commutator(const GeneratorWord& u, const GeneratorWord& v);

// Exponent-sum pair (a-sum mod p, b-sum mod p); the abelianization image
// Gamma_(p) -> C_p x C_p. Gupta-Sidki only.
struct AbelianImage {
  int a_sum;
  int b_sum;
  bool operator==(const AbelianImage&) const = default;
  bool is_zero() const { return a_sum == 0 && b_sum == 0; }
};
AbelianImage exponent_sums(const GeneratorWord& w);

// The standard generating set: {a,b,c,d} for Grigorchuk, {a,b} for
// Gupta-Sidki.
std::vector<GeneratorWord> standard_generators(GroupSpec g);

}  // namespace branchdiam
