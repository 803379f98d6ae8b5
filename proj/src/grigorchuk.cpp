#include "branchdiam/grigorchuk.hpp"

#include <algorithm>
#include <string>
#include <utility>

namespace branchdiam {

namespace {

const GroupSpec kGrig = GroupSpec::grigorchuk();

// Product of conjugated powers of x: prod_i (x^k_i)^(g_i). Closed under the
// zero and one embeddings, which is what makes iterated branch embedding
// representable by explicit words.
struct BranchExpr {
  std::vector<std::pair<long long, GeneratorWord>> terms;
};

BranchExpr expr_base(int power) {
  BranchExpr e;
  e.terms.push_back({power, GeneratorWord(kGrig)});
  return e;
}

// zero(x) = (x,1) realized as the word [x, ca]: conjugation by ca inverts
// the first section of x and fixes the second, so x^-1 * x^(ca) = (x, 1).
const std::vector<std::pair<long long, std::string>> kZeroOfX = {
    {-1, ""}, {1, "ca"}};

BranchExpr expr_zero(const BranchExpr& e) {
  BranchExpr out;
  for (const auto& [k, g] : e.terms) {
    const GeneratorWord lg = grig_lift(g);
    const long long reps = k < 0 ? -k : k;
    for (long long r = 0; r < reps; ++r) {
      if (k >= 0) {
        for (const auto& [m, h] : kZeroOfX)
          out.terms.push_back({m, concat(word_from_string(kGrig, h), lg)});
      } else {
        for (auto it = kZeroOfX.rbegin(); it != kZeroOfX.rend(); ++it)
          out.terms.push_back(
              {-it->first, concat(word_from_string(kGrig, it->second), lg)});
      }
    }
  }
  return out;
}

// one(e) = zero(e) * a zero(e)^-1 a = (e, e^-1).
BranchExpr expr_one(const BranchExpr& e) {
  BranchExpr z = expr_zero(e);
  BranchExpr out = z;
  const GeneratorWord a = word_from_string(kGrig, "a");
  for (auto it = z.terms.rbegin(); it != z.terms.rend(); ++it)
    out.terms.push_back({-it->first, concat(it->second, a)});
  return out;
}

GeneratorWord expr_word(const BranchExpr& e) {
  GeneratorWord w(kGrig);
  const GeneratorWord x = grig_x();
  for (const auto& [k, g] : e.terms)
    w = concat(w, conjugate(power(x, k), g));
  return w;
}

Elem pair2(Elem a, Elem b) {
  return Elem::tuple(kGrig, {std::move(a), std::move(b)});
}

Elem quad(Elem a, Elem b, Elem c, Elem d) {
  return pair2(pair2(std::move(a), std::move(b)),
               pair2(std::move(c), std::move(d)));
}

Elem elem_commutator(const Elem& u, const Elem& v) {
  return u.inv() * v.inv() * u * v;
}

// Expected index of K^(x 2^m): 16 for K itself, then each branch doubling
// multiplies by |K/K^(x 2)|^(2^(m-1)) = 4^(2^(m-1)).
std::uint64_t expected_kpow_index(int m) {
  std::uint64_t idx = 16;
  for (int i = 0; i < m; ++i) idx *= std::uint64_t(1) << (std::uint64_t(2) << i);
  return idx;
}

}  // namespace

GeneratorWord grig_x() { return word_from_string(kGrig, "abab"); }

GeneratorWord grig_lift(const GeneratorWord& w) {
  GeneratorWord out(kGrig);
  for (const Letter& l : w.letters()) {
    const char* rep = nullptr;
    switch (l.symbol) {
      case 'a': rep = "b"; break;
      case 'b': rep = "ada"; break;
      case 'c': rep = "aba"; break;
      case 'd': rep = "aca"; break;
      default: throw InvalidWordError("bad Grigorchuk symbol");
    }
    // All generators are involutions, so the exponent sign is immaterial;
    // repeat |exponent| times.
    long long reps = l.exponent < 0 ? -l.exponent : l.exponent;
    for (long long r = 0; r < reps; ++r)
      out = concat(out, word_from_string(kGrig, rep));
  }
  return out;
}

GeneratorWord branch_embed(const DegreeQuery& q) {
  BranchExpr e = expr_base(q.squared ? 2 : 1);
  // X_1 is outermost, so apply the maps innermost-first.
  for (auto it = q.bits.rbegin(); it != q.bits.rend(); ++it)
    e = *it ? expr_one(e) : expr_zero(e);
  return expr_word(e);
}

long long degree_formula(const DegreeQuery& q) {
  const int n = static_cast<int>(q.bits.size());
  long long deg = 1;
  for (int i = 0; i < n; ++i)
    if (q.bits[i]) deg += 1LL << i;
  deg += 1LL << (q.squared ? n + 1 : n);
  return deg;
}

VerifyStatus verify_degree(const FiniteQuotient& q,
                           const std::vector<SubgroupHandle>& lcs,
                           const DegreeQuery& query) {
  const GeneratorWord w = branch_embed(query);
  auto idx = q.index_of(level_permutation(w, q.level()));
  if (!idx) throw InconsistencyError("branch word image missing from quotient");
  const long long deg = degree_formula(query);
  if (*idx == q.identity()) return VerifyStatus::Inconclusive;
  long long placed = 0;
  for (std::size_t i = 0; i < lcs.size(); ++i) {
    if (!lcs[i].contains(*idx)) break;
    placed = static_cast<long long>(i) + 1;
  }
  // The chain ends at the trivial subgroup, so a nonidentity image always
  // leaves the chain at its true quotient depth.
  if (placed == deg) return VerifyStatus::Verified;
  return placed > deg ? VerifyStatus::Inconclusive : VerifyStatus::Contradicted;
}

bool verify_identity_lemma(int idx, int level) {
  const GeneratorWord xw = grig_x();
  const Elem x = Elem(xw);
  const Elem xi = Elem(inverse(xw));
  const Elem x2 = Elem(power(xw, 2));
  const Elem e1 = Elem(kGrig);

  Elem lhs(kGrig), rhs(kGrig);
  switch (idx) {
    case 1:
      lhs = elem_commutator(x, pair2(x, e1));
      rhs = quad(xi, e1, e1, e1);
      break;
    case 2:
      lhs = elem_commutator(x, pair2(x, x));
      rhs = quad(xi, e1, e1, pair2(e1, xi) * x);
      break;
    case 3:
      lhs = elem_commutator(x2, pair2(x, e1));
      rhs = quad(xi, x, e1, e1);
      break;
    case 4:
      lhs = elem_commutator(x2, pair2(x, xi));
      rhs = quad(xi, x, pair2(xi, e1) * xi, pair2(e1, xi) * x);
      break;
    default:
      throw PreconditionError("identity index must be 1..4");
  }
  return lhs.level_perm(level) == rhs.level_perm(level);
}

bool verify_relations(int max_level) {
  auto w = [](std::vector<Letter> ls) {
    return GeneratorWord(GroupSpec::grigorchuk(), std::move(ls));
  };
  const std::vector<GeneratorWord> relators = {
      w({{'a', 2}}),
      w({{'b', 2}}),
      w({{'c', 2}}),
      w({{'d', 2}}),
      w({{'b', 1}, {'c', 1}, {'d', -1}}),
      w({{'c', 1}, {'b', 1}, {'d', -1}}),
      w({{'c', 1}, {'d', 1}, {'b', -1}}),
      w({{'d', 1}, {'c', 1}, {'b', -1}}),
      w({{'b', 1}, {'d', 1}, {'c', -1}}),
      w({{'d', 1}, {'b', 1}, {'c', -1}}),
  };
  for (const GeneratorWord& r : relators)
    if (!acts_trivially(r, max_level)) return false;
  return true;
}

SubgroupHandle grig_K_image(const FiniteQuotient& q, int m) {
  DegreeQuery query;
  query.bits.assign(m, 0);
  const GeneratorWord seed = branch_embed(query);
  auto idx = q.index_of(level_permutation(seed, q.level()));
  if (!idx) throw InconsistencyError("K seed image missing from quotient");
  return normal_closure(q, {*idx});
}

bool verify_squaring(const FiniteQuotient& q,
                     const std::vector<SubgroupHandle>& lcs, int m) {
  if (m < 1) throw PreconditionError("squaring check needs m >= 1");
  SubgroupHandle A = grig_K_image(q, m - 1);
  SubgroupHandle B = grig_K_image(q, m);
  if (A.index_in_parent() != expected_kpow_index(m - 1) ||
      B.index_in_parent() != expected_kpow_index(m))
    throw UndecidedError("K-power image index not stable at this level",
                         q.level());
  const std::size_t gidx = (std::size_t(1) << m);  // gamma_{2^m+1} = lcs[2^m]
  if (lcs.size() <= gidx)
    throw UndecidedError("lower central series too short at this level",
                         q.level());
  const SubgroupHandle& G = lcs[gidx];

  CosetGroup CB(q, B);
  std::vector<bool> target(CB.order(), false);
  std::vector<bool> covered(CB.order(), false);
  for (std::uint32_t e : G.elements) target[CB.coset_of(e)] = true;
  for (std::uint32_t e : A.elements) {
    std::uint32_t c = CB.coset_of(q.mul(e, e));
    // Squares of K^(x 2^(m-1)) must land inside gamma_{2^m+1}.
    if (!target[c]) return false;
    covered[c] = true;
  }
  for (std::uint64_t c = 0; c < CB.order(); ++c)
    if (target[c] && !covered[c]) return false;
  return true;
}

std::vector<GeneratorWord> covering_ball(const FiniteQuotient& q,
                                         const SubgroupHandle& working,
                                         const SubgroupHandle& target,
                                         int* radius_out) {
  CosetGroup W(q, working);
  CosetGroup T(q, target);

  // BFS over q/working in the standard generators, recording shortest words.
  const auto& gens = q.generator_indices();
  const auto& gen_words = q.generator_words();
  std::vector<std::int32_t> dist(W.order(), -1);
  std::vector<std::uint32_t> parent(W.order(), 0);
  std::vector<std::int32_t> edge(W.order(), -1);
  std::vector<std::uint32_t> queue;
  dist[W.identity()] = 0;
  queue.push_back(W.identity());
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::uint32_t u = queue[head];
    for (std::size_t gi = 0; gi < gens.size(); ++gi) {
      std::uint32_t v = W.coset_of(q.mul(W.rep(u), gens[gi]));
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        parent[v] = u;
        edge[v] = static_cast<std::int32_t>(gi);
        queue.push_back(v);
      }
    }
  }

  // Radius: every coset of the target subgroup must contain a ball element.
  std::vector<std::int32_t> best(T.order(), -1);
  for (std::uint64_t c = 0; c < W.order(); ++c) {
    if (dist[c] < 0) continue;
    std::uint32_t t = T.coset_of(W.rep(static_cast<std::uint32_t>(c)));
    if (best[t] < 0 || dist[c] < best[t]) best[t] = dist[c];
  }
  int radius = 0;
  for (std::uint64_t t = 0; t < T.order(); ++t) {
    if (best[t] < 0)
      throw PreconditionError("generators do not cover the target quotient");
    radius = std::max(radius, static_cast<int>(best[t]));
  }
  if (radius_out) *radius_out = radius;

  std::vector<GeneratorWord> out;
  for (std::uint64_t c = 0; c < W.order(); ++c) {
    if (dist[c] < 0 || dist[c] > radius) continue;
    GeneratorWord w(q.group());
    std::uint32_t cur = static_cast<std::uint32_t>(c);
    std::vector<int> seq;
    while (edge[cur] >= 0) {
      seq.push_back(edge[cur]);
      cur = parent[cur];
    }
    std::reverse(seq.begin(), seq.end());
    for (int gi : seq) w = concat(w, gen_words[gi]);
    out.push_back(std::move(w));
  }
  return out;
}

SKReport sk_step_verify(const FiniteQuotient& q,
                        const std::vector<SubgroupHandle>& lcs, int m,
                        const std::vector<GeneratorWord>& X) {
  if (m < 2) throw PreconditionError("cover-growth step needs m >= 2");
  const std::size_t hyp_idx = std::size_t(1) << m;         // gamma_{2^m+1}
  const std::size_t tgt_idx = std::size_t(1) << (m + 1);   // gamma_{2^(m+1)+1}
  if (lcs.size() <= tgt_idx)
    throw UndecidedError("lower central series too short at this level",
                         q.level());
  const SubgroupHandle& Ghyp = lcs[hyp_idx];
  const SubgroupHandle& Gtgt = lcs[tgt_idx];
  const std::uint64_t expect = std::uint64_t(1) << (3 * (std::uint64_t(1) << m) + 2);
  if (Gtgt.index_in_parent() != expect)
    throw InconsistencyError(
        "central quotient order does not match the closed form");

  CosetGroup Qbar(q, Gtgt);
  CosetGroup Chyp(q, Ghyp);

  // Map X into q/gamma_{2^(m+1)+1} and check the covering hypothesis
  // X gamma_{2^m+1} = everything.
  std::vector<bool> hyp_covered(Chyp.order(), false);
  std::vector<std::uint32_t> ximg;
  std::vector<bool> seen(Qbar.order(), false);
  bool has_identity = false;
  for (const GeneratorWord& w : X) {
    auto idx = q.index_of(level_permutation(w, q.level()));
    if (!idx) throw InconsistencyError("cover word image missing from quotient");
    hyp_covered[Chyp.coset_of(*idx)] = true;
    std::uint32_t c = Qbar.coset_of(*idx);
    if (c == Qbar.identity()) has_identity = true;
    if (!seen[c]) {
      seen[c] = true;
      ximg.push_back(c);
    }
  }
  for (std::uint64_t c = 0; c < Chyp.order(); ++c)
    if (!hyp_covered[c])
      throw PreconditionError("cover does not meet hypothesis coset " +
                              std::to_string(c));
  if (!has_identity)
    throw PreconditionError("cover must contain the identity");

  SKReport rep;
  rep.bound = 35;
  rep.group_order = Qbar.order();
  rep.cover_size = ximg.size();
  rep.witness = covering_exponent_witnessed(Qbar, ximg);
  rep.exponent = rep.witness.exponent;
  rep.within_bound = rep.exponent <= rep.bound;
  return rep;
}

CtildeResult grig_ctilde(const FiniteQuotient& q,
                         const std::vector<SubgroupHandle>& lcs) {
  if (lcs.size() <= 4)
    throw UndecidedError("lower central series too short at this level",
                         q.level());
  CosetGroup C(q, lcs[4]);
  std::vector<std::uint32_t> gens;
  for (std::uint32_t g : q.generator_indices()) gens.push_back(C.coset_of(g));
  CtildeResult r;
  try {
    r.value = worst_case_diameter(C, gens);
    r.worst_case = true;
  } catch (const CapExceededError&) {
    std::vector<std::uint32_t> sym = gens;
    for (std::uint32_t g : gens) sym.push_back(C.inv(g));
    std::sort(sym.begin(), sym.end());
    sym.erase(std::unique(sym.begin(), sym.end()), sym.end());
    CoverWitness w = covering_exponent_witnessed(C, sym);
    r.value = w.exponent;
    r.worst_case = false;
  }
  return r;
}

mpz_class diameter_bound(long long n, long long ctilde) {
  if (n < 1) throw PreconditionError("diameter bound needs n >= 1");
  mpz_class bound = static_cast<long>(ctilde);
  if (n <= 5) return bound;
  int m = 2;
  while ((1LL << m) + 1 < n) ++m;
  mpz_class pw;
  mpz_ui_pow_ui(pw.get_mpz_t(), 35, static_cast<unsigned long>(m - 2));
  return bound * pw;
}

}  // namespace branchdiam
