#include "branchdiam/wreath.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace branchdiam {

namespace {

std::uint64_t pow_u64(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::vector<int> identity_root(int p) {
  std::vector<int> r(p);
  for (int i = 0; i < p; ++i) r[i] = i;
  return r;
}

// Wreath recursion of a single run-length letter.
Section letter_section(const GroupSpec& g, const Letter& l) {
  const int p = g.prime;
  Section s;
  s.root = identity_root(p);
  s.children.assign(p, GeneratorWord(g));
  if (g.family == Family::Grigorchuk) {
    switch (l.symbol) {
      case 'a':
        s.root = {1, 0};
        break;
      case 'b':
        s.children[0] = word_from_string(g, "a");
        s.children[1] = word_from_string(g, "c");
        break;
      case 'c':
        s.children[0] = word_from_string(g, "a");
        s.children[1] = word_from_string(g, "d");
        break;
      case 'd':
        s.children[1] = word_from_string(g, "b");
        break;
      default:
        throw InvalidWordError("bad Grigorchuk symbol");
    }
  } else {
    const int k = ((l.exponent % p) + p) % p;
    if (l.symbol == 'a') {
      for (int i = 0; i < p; ++i) s.root[i] = (i + k) % p;
    } else {
      // b^k = (a^k, a^-k, 1, ..., 1, b^k); the entries commute since the
      // root action is trivial.
      s.children[0] = power(word_from_string(g, "a"), k);
      s.children[1] = power(word_from_string(g, "a"), -k);
      s.children[p - 1] = power(word_from_string(g, "b"), k);
    }
  }
  return s;
}

}  // namespace

bool LevelPermutation::is_identity() const {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != i) return false;
  return true;
}

std::string LevelPermutation::csv() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) out << ',';
    out << perm[i];
  }
  return out.str();
}

LevelPermutation compose(const LevelPermutation& u, const LevelPermutation& v) {
  if (u.prime != v.prime || u.level != v.level)
    throw InconsistencyError("composing permutations of different levels");
  LevelPermutation r{u.prime, u.level, std::vector<std::uint32_t>(u.perm.size())};
  for (std::size_t i = 0; i < u.perm.size(); ++i) r.perm[i] = v.perm[u.perm[i]];
  return r;
}

LevelPermutation inverse(const LevelPermutation& u) {
  LevelPermutation r{u.prime, u.level, std::vector<std::uint32_t>(u.perm.size())};
  for (std::size_t i = 0; i < u.perm.size(); ++i) r.perm[u.perm[i]] = i;
  return r;
}

LevelPermutation identity_perm(int prime, int level) {
  LevelPermutation r{prime, level, {}};
  r.perm.resize(pow_u64(prime, level));
  for (std::size_t i = 0; i < r.perm.size(); ++i) r.perm[i] = i;
  return r;
}

Section decompose(const GeneratorWord& w_in) {
  const GeneratorWord w = reduce(w_in);
  const GroupSpec& g = w.group();
  const int p = g.prime;
  Section acc;
  acc.root = identity_root(p);
  acc.children.assign(p, GeneratorWord(g));
  for (const Letter& l : w.letters()) {
    Section s = letter_section(g, l);
    std::vector<int> new_root(p);
    for (int x = 0; x < p; ++x) {
      acc.children[x] = concat(acc.children[x], s.children[acc.root[x]]);
      new_root[x] = s.root[acc.root[x]];
    }
    acc.root = std::move(new_root);
  }
  return acc;
}

LevelPermutation level_permutation(const GeneratorWord& w, int n,
                                   std::uint64_t max_leaves) {
  const int p = w.group().prime;
  std::uint64_t leaves = pow_u64(p, n);
  if (leaves > max_leaves)
    throw CapExceededError("level permutation would exceed the leaf cap",
                           leaves);
  if (n == 0) return identity_perm(p, 0);
  Section s = decompose(w);
  const std::uint64_t q = leaves / p;
  LevelPermutation r{p, n, std::vector<std::uint32_t>(leaves)};
  for (int x = 0; x < p; ++x) {
    LevelPermutation sub = level_permutation(s.children[x], n - 1, max_leaves);
    const std::uint64_t base_in = static_cast<std::uint64_t>(x) * q;
    const std::uint64_t base_out = static_cast<std::uint64_t>(s.root[x]) * q;
    for (std::uint64_t i = 0; i < q; ++i)
      r.perm[base_in + i] = static_cast<std::uint32_t>(base_out + sub.perm[i]);
  }
  return r;
}

bool in_stab(const GeneratorWord& w, int n, std::uint64_t max_leaves) {
  return level_permutation(w, n, max_leaves).is_identity();
}

namespace {

bool is_identity_rec(const GeneratorWord& w, int depth_left, int depth_used) {
  const GroupSpec& g = w.group();
  if (w.empty()) return true;
  Section s = decompose(w);
  for (int x = 0; x < g.prime; ++x)
    if (s.root[x] != x) return false;
  if (g.family == Family::Grigorchuk) {
    // Reduced nonempty words of length <= 2 are never the identity: single
    // generators are nontrivial, and any reduced pair contains 'a' and acts
    // nontrivially at the root or below. The root check above already
    // rejected those with nontrivial root, and the only root-trivial reduced
    // words of length <= 2 are the single letters b, c, d.
    if (w.length() <= 2) return false;
  } else {
    if (w.length() <= 1) return false;
    if (depth_left == 0)
      throw UndecidedError(
          "Gupta-Sidki word problem hit the recursion depth guard",
          depth_used);
  }
  for (int x = 0; x < g.prime; ++x)
    if (!is_identity_rec(s.children[x], depth_left - 1, depth_used + 1))
      return false;
  return true;
}

}  // namespace

bool is_identity(const GeneratorWord& w, int depth_guard) {
  return is_identity_rec(reduce(w), depth_guard, 0);
}

namespace {

// Letter-by-letter wreath recursion that performs no reduction at all:
// exponents expand into repeated single letters and the root permutation is
// composed as an honest permutation of the alphabet.
struct RawSection {
  std::vector<int> root;
  std::vector<std::vector<Letter>> children;
};

RawSection raw_decompose(const GroupSpec& g, const std::vector<Letter>& w) {
  const int p = g.prime;
  RawSection acc;
  acc.root = identity_root(p);
  acc.children.assign(p, {});
  for (const Letter& l : w) {
    const int sign = l.exponent < 0 ? -1 : 1;
    const long long reps = l.exponent < 0 ? -static_cast<long long>(l.exponent)
                                          : l.exponent;
    for (long long r = 0; r < reps; ++r) {
      Section s = letter_section(g, Letter{l.symbol, sign});
      std::vector<int> new_root(p);
      for (int x = 0; x < p; ++x) {
        for (const Letter& cl : s.children[acc.root[x]].letters())
          acc.children[x].push_back(cl);
        new_root[x] = s.root[acc.root[x]];
      }
      acc.root = std::move(new_root);
    }
  }
  return acc;
}

std::string letters_key(const std::vector<Letter>& w) {
  std::string k;
  for (const Letter& l : w) {
    k += l.symbol;
    k += l.exponent < 0 ? '-' : '+';
    k += std::to_string(l.exponent < 0 ? -l.exponent : l.exponent);
  }
  return k;
}

bool acts_trivially_rec(const GroupSpec& g, const std::vector<Letter>& w, int n,
                        std::map<std::string, int>& proven) {
  if (n == 0 || w.empty()) return true;
  const std::string key = letters_key(w);
  auto it = proven.find(key);
  if (it != proven.end() && it->second >= n) return true;
  RawSection s = raw_decompose(g, w);
  for (int x = 0; x < g.prime; ++x)
    if (s.root[x] != x) return false;
  for (int x = 0; x < g.prime; ++x)
    if (!acts_trivially_rec(g, s.children[x], n - 1, proven)) return false;
  proven[key] = std::max(proven[key], n);
  return true;
}

}  // namespace

bool acts_trivially(const GeneratorWord& w, int n) {
  std::map<std::string, int> proven;
  return acts_trivially_rec(w.group(), w.letters(), n, proven);
}

Elem Elem::tuple(GroupSpec g, ElemTuple entries) {
  if (static_cast<int>(entries.size()) != g.prime)
    throw InconsistencyError("tuple must have one entry per alphabet letter");
  std::vector<Factor> fs;
  fs.emplace_back(std::move(entries));
  return Elem(g, std::move(fs));
}

Elem Elem::operator*(const Elem& rhs) const {
  if (!(group_ == rhs.group_))
    throw InconsistencyError("multiplying elements of different groups");
  std::vector<Factor> fs = factors_;
  for (const Factor& f : rhs.factors_) {
    // Merge adjacent word factors so products of words stay words.
    if (!fs.empty() && std::holds_alternative<GeneratorWord>(f) &&
        std::holds_alternative<GeneratorWord>(fs.back())) {
      fs.back() =
          concat(std::get<GeneratorWord>(fs.back()), std::get<GeneratorWord>(f));
    } else {
      fs.push_back(f);
    }
  }
  return Elem(group_, std::move(fs));
}

Elem Elem::inv() const {
  std::vector<Factor> fs;
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) {
    if (std::holds_alternative<GeneratorWord>(*it)) {
      fs.emplace_back(inverse(std::get<GeneratorWord>(*it)));
    } else {
      // Tuples are root-trivial, so inversion is entrywise.
      ElemTuple t;
      for (const Elem& e : std::get<ElemTuple>(*it)) t.push_back(e.inv());
      fs.emplace_back(std::move(t));
    }
  }
  return Elem(group_, std::move(fs));
}

std::vector<int> Elem::root() const {
  const int p = group_.prime;
  std::vector<int> r(p);
  for (int i = 0; i < p; ++i) r[i] = i;
  for (const Factor& f : factors_) {
    if (std::holds_alternative<GeneratorWord>(f)) {
      Section s = decompose(std::get<GeneratorWord>(f));
      for (int x = 0; x < p; ++x) r[x] = s.root[r[x]];
    }
    // Tuples act trivially at the root.
  }
  return r;
}

std::vector<Elem> Elem::sections() const {
  const int p = group_.prime;
  std::vector<int> r(p);
  for (int i = 0; i < p; ++i) r[i] = i;
  std::vector<Elem> sec(p, Elem(group_));
  for (const Factor& f : factors_) {
    if (std::holds_alternative<GeneratorWord>(f)) {
      Section s = decompose(std::get<GeneratorWord>(f));
      std::vector<int> nr(p);
      for (int x = 0; x < p; ++x) {
        sec[x] = sec[x] * Elem(s.children[r[x]]);
        nr[x] = s.root[r[x]];
      }
      r = std::move(nr);
    } else {
      const ElemTuple& t = std::get<ElemTuple>(f);
      for (int x = 0; x < p; ++x) sec[x] = sec[x] * t[r[x]];
    }
  }
  return sec;
}

std::optional<GeneratorWord> Elem::as_word() const {
  GeneratorWord w(group_);
  for (const Factor& f : factors_) {
    if (!std::holds_alternative<GeneratorWord>(f)) return std::nullopt;
    w = concat(w, std::get<GeneratorWord>(f));
  }
  return w;
}

LevelPermutation Elem::level_perm(int n, std::uint64_t max_leaves) const {
  const int p = group_.prime;
  std::uint64_t leaves = pow_u64(p, n);
  if (leaves > max_leaves)
    throw CapExceededError("level permutation would exceed the leaf cap",
                           leaves);
  if (auto w = as_word()) return level_permutation(*w, n, max_leaves);
  if (n == 0) return identity_perm(p, 0);
  std::vector<int> r = root();
  std::vector<Elem> sec = sections();
  const std::uint64_t q = leaves / p;
  LevelPermutation out{p, n, std::vector<std::uint32_t>(leaves)};
  for (int x = 0; x < p; ++x) {
    LevelPermutation sub = sec[x].level_perm(n - 1, max_leaves);
    const std::uint64_t base_in = static_cast<std::uint64_t>(x) * q;
    const std::uint64_t base_out = static_cast<std::uint64_t>(r[x]) * q;
    for (std::uint64_t i = 0; i < q; ++i)
      out.perm[base_in + i] = static_cast<std::uint32_t>(base_out + sub.perm[i]);
  }
  return out;
}

std::vector<GeneratorWord> section_words(const Elem& e) {
  std::vector<GeneratorWord> out;
  for (const Elem& s : e.sections()) {
    auto w = s.as_word();
    if (!w)
      throw InconsistencyError(
          "section still contains an unresolved tuple factor");
    out.push_back(*w);
  }
  return out;
}

}  // namespace branchdiam
