#include "branchdiam/words.hpp"

#include <cctype>
#include <numeric>
#include <sstream>

namespace branchdiam {

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

bool symbol_ok(const GroupSpec& g, char s) {
  if (g.family == Family::Grigorchuk) return s >= 'a' && s <= 'd';
  return s == 'a' || s == 'b';
}

int positive_mod(long long e, int m) {
  long long r = e % m;
  if (r < 0) r += m;
  return static_cast<int>(r);
}

// Klein four-group product table on {b,c,d}: bc=d, cd=b, bd=c.
char klein_product(char u, char v) {
  // u != v, both in {b,c,d}; the product is the third letter.
  return static_cast<char>('b' + 'c' + 'd' - u - v);
}

}  // namespace

GroupSpec GroupSpec::gupta_sidki(int p) {
  if (p < 3 || p % 2 == 0 || !is_prime(p))
    throw InvalidWordError("Gupta-Sidki prime must be an odd prime, got " +
                           std::to_string(p));
  return {Family::GuptaSidki, p};
}

std::string GroupSpec::name() const {
  if (family == Family::Grigorchuk) return "grigorchuk";
  return "gupta-sidki:p=" + std::to_string(prime);
}

GroupSpec GroupSpec::parse(std::string_view s) {
  if (s == "grigorchuk") return grigorchuk();
  constexpr std::string_view kPrefix = "gupta-sidki:p=";
  if (s.substr(0, kPrefix.size()) == kPrefix) {
    int p = 0;
    for (char c : s.substr(kPrefix.size())) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        throw InvalidWordError("bad prime in group name: " + std::string(s));
      p = p * 10 + (c - '0');
    }
    return gupta_sidki(p);
  }
  throw InvalidWordError("unknown group name: " + std::string(s));
}

GeneratorWord::GeneratorWord(GroupSpec g, std::vector<Letter> letters)
    : group_(g), letters_(std::move(letters)) {
  for (const Letter& l : letters_) {
    if (!symbol_ok(group_, l.symbol))
      throw InvalidWordError(std::string("symbol '") + l.symbol +
                             "' not in alphabet of " + group_.name());
  }
}

std::size_t GeneratorWord::length() const {
  std::size_t n = 0;
  for (const Letter& l : letters_)
    n += static_cast<std::size_t>(l.exponent < 0 ? -l.exponent : l.exponent);
  return n;
}

std::string GeneratorWord::str() const {
  if (letters_.empty()) return "1";
  std::ostringstream out;
  for (const Letter& l : letters_) {
    out << l.symbol;
    if (l.exponent == -1)
      out << '\'';
    else if (l.exponent != 1)
      out << '^' << l.exponent;
  }
  return out.str();
}

GeneratorWord reduce(const GeneratorWord& w) {
  const GroupSpec& g = w.group();
  const int order = g.prime == 2 ? 2 : g.prime;  // all generators have order p
  std::vector<Letter> out;
  out.reserve(w.letters().size());

  auto push = [&](char sym, long long exp) {
    // Merge with the tail, then apply Grigorchuk Klein relations, repeating
    // until the tail is stable.
    char s = sym;
    long long e = exp;
    for (;;) {
      if (!out.empty() && out.back().symbol == s) {
        e += out.back().exponent;
        out.pop_back();
      }
      int r = positive_mod(e, order);
      if (r == 0) {
        if (out.empty()) return;
        // The tail changed; nothing new to add.
        return;
      }
      // Canonical exponent: 1..order-1 (for order 2 this is +1 only).
      if (g.family == Family::Grigorchuk && !out.empty() && s != 'a' &&
          out.back().symbol != 'a') {
        char prev = out.back().symbol;
        out.pop_back();
        s = klein_product(prev, s);
        e = 1;
        continue;  // the new single letter may merge further left
      }
      out.push_back({s, r});
      return;
    }
  };

  for (const Letter& l : w.letters()) {
    if (!symbol_ok(g, l.symbol))
      throw InvalidWordError(std::string("symbol '") + l.symbol +
                             "' not in alphabet of " + g.name());
    push(l.symbol, l.exponent);
  }
  return GeneratorWord(g, std::move(out));
}

namespace {

// Recursive-descent parser for the word grammar: letters a b c d, inverse
// suffix ', power suffix ^k, commutator [u,v] = u^-1 v^-1 u v, concatenation
// by juxtaposition, whitespace ignored.
class Parser {
 public:
  Parser(GroupSpec g, std::string_view text) : g_(g), text_(text) {}

  GeneratorWord parse() {
    GeneratorWord w = parse_sequence();
    skip_ws();
    if (pos_ != text_.size())
      throw InvalidWordError("unexpected character '" +
                             std::string(1, text_[pos_]) + "' in word");
    return w;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek_atom_start() {
    skip_ws();
    if (pos_ >= text_.size()) return false;
    char c = text_[pos_];
    return (c >= 'a' && c <= 'z') || c == '[' || c == '(';
  }

  GeneratorWord parse_sequence() {
    GeneratorWord w(g_);
    while (peek_atom_start()) w = concat(w, parse_atom());
    return w;
  }

  GeneratorWord parse_atom() {
    skip_ws();
    char c = text_[pos_];
    GeneratorWord base(g_);
    if (c == '[') {
      ++pos_;
      GeneratorWord u = parse_sequence();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ',')
        throw InvalidWordError("expected ',' in commutator");
      ++pos_;
      GeneratorWord v = parse_sequence();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ']')
        throw InvalidWordError("expected ']' in commutator");
      ++pos_;
      base = commutator(u, v);
    } else if (c == '(') {
      ++pos_;
      base = parse_sequence();
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != ')')
        throw InvalidWordError("expected ')'");
      ++pos_;
    } else {
      if (!symbol_ok(g_, c))
        throw InvalidWordError(std::string("symbol '") + c +
                               "' not in alphabet of " + g_.name());
      ++pos_;
      base = GeneratorWord(g_, {{c, 1}});
    }
    // Suffixes: any run of ' and ^k applies to the atom.
    for (;;) {
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '\'') {
        ++pos_;
        base = inverse(base);
      } else if (pos_ < text_.size() && text_[pos_] == '^') {
        ++pos_;
        skip_ws();
        bool neg = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
          neg = text_[pos_] == '-';
          ++pos_;
        }
        if (pos_ >= text_.size() ||
            !std::isdigit(static_cast<unsigned char>(text_[pos_])))
          throw InvalidWordError("expected integer after '^'");
        long long k = 0;
        while (pos_ < text_.size() &&
               std::isdigit(static_cast<unsigned char>(text_[pos_])))
          k = k * 10 + (text_[pos_++] - '0');
        base = power(base, neg ? -k : k);
      } else {
        return base;
      }
    }
  }

  GroupSpec g_;
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

GeneratorWord word_from_string(GroupSpec g, std::string_view text) {
  return Parser(g, text).parse();
}

GeneratorWord concat(const GeneratorWord& u, const GeneratorWord& v) {
  if (!(u.group() == v.group()))
    throw InvalidWordError("cannot concatenate words from different groups");
  std::vector<Letter> ls = u.letters();
  ls.insert(ls.end(), v.letters().begin(), v.letters().end());
  return reduce(GeneratorWord(u.group(), std::move(ls)));
}

GeneratorWord inverse(const GeneratorWord& w) {
  std::vector<Letter> ls;
  ls.reserve(w.letters().size());
  for (auto it = w.letters().rbegin(); it != w.letters().rend(); ++it)
    ls.push_back({it->symbol, -it->exponent});
  return reduce(GeneratorWord(w.group(), std::move(ls)));
}

GeneratorWord power(const GeneratorWord& w, long long k) {
  GeneratorWord base = k < 0 ? inverse(w) : reduce(w);
  long long n = k < 0 ? -k : k;
  GeneratorWord acc(w.group());
  for (long long i = 0; i < n; ++i) acc = concat(acc, base);
  return acc;
}

GeneratorWord conjugate(const GeneratorWord& w, const GeneratorWord& g) {
  return concat(concat(inverse(g), w), g);
}

GeneratorWord commutator(const GeneratorWord& u, const GeneratorWord& v) {
  return concat(concat(inverse(u), inverse(v)), concat(u, v));
}

AbelianImage exponent_sums(const GeneratorWord& w) {
  if (w.group().family != Family::GuptaSidki)
    throw UnsupportedOperationError(
        "exponent_sums applies to Gupta-Sidki words only; Grigorchuk "
        "abelianization goes through finite quotients");
  const int p = w.group().prime;
  long long a = 0, b = 0;
  for (const Letter& l : w.letters()) {
    if (l.symbol == 'a')
      a += l.exponent;
    else
      b += l.exponent;
  }
  return {positive_mod(a, p), positive_mod(b, p)};
}

std::vector<GeneratorWord> standard_generators(GroupSpec g) {
  std::vector<GeneratorWord> out;
  const char* syms = g.family == Family::Grigorchuk ? "abcd" : "ab";
  for (const char* s = syms; *s; ++s)
    out.push_back(GeneratorWord(g, {{*s, 1}}));
  return out;
}

}  // namespace branchdiam
