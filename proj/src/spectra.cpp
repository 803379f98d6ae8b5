#include "branchdiam/spectra.hpp"

#include <gmpxx.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "branchdiam/errors.hpp"
#include "branchdiam/wreath.hpp"

namespace branchdiam {

namespace {

std::uint32_t image_index(const FiniteQuotient& q, const GeneratorWord& w) {
  auto idx = q.index_of(level_permutation(w, q.level()));
  if (!idx)
    throw InconsistencyError("generator image '" + w.str() +
                             "' is missing from the quotient");
  return *idx;
}

// Orbit of the identity under right multiplication by the given images.
std::uint64_t reachable_count(const FiniteQuotient& q,
                              const std::vector<std::uint32_t>& gens) {
  std::vector<bool> seen(q.order(), false);
  std::queue<std::uint32_t> bfs;
  seen[q.identity()] = true;
  bfs.push(q.identity());
  std::uint64_t count = 1;
  while (!bfs.empty()) {
    std::uint32_t v = bfs.front();
    bfs.pop();
    for (std::uint32_t s : gens) {
      std::uint32_t w = q.mul(v, s);
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        bfs.push(w);
      }
    }
  }
  return count;
}

}  // namespace

CayleyOperator::CayleyOperator(const FiniteQuotient& q,
                               const std::vector<GeneratorWord>& S)
    : q_(&q) {
  if (S.empty() && q.order() > 1)
    throw PreconditionError("CayleyOperator: empty generator multiset");
  gens_.reserve(S.size());
  for (const auto& w : S) gens_.push_back(image_index(q, w));
  // The multiset must be inverse-closed for A_S to be symmetric.
  std::map<std::uint32_t, long long> count;
  for (std::uint32_t s : gens_) ++count[s];
  for (const auto& [s, c] : count)
    if (count[q.inv(s)] != c)
      throw PreconditionError(
          "CayleyOperator: generator multiset is not symmetric (inverse "
          "counts differ)");
  std::vector<std::uint32_t> distinct;
  for (const auto& [s, c] : count) distinct.push_back(s);
  generating_ = reachable_count(q, distinct) == q.order();
  // Neighbor table, one row per vertex.
  std::uint64_t n = q.order();
  nbr_.resize(n * gens_.size());
  for (std::uint64_t v = 0; v < n; ++v)
    for (std::size_t k = 0; k < gens_.size(); ++k)
      nbr_[v * gens_.size() + k] =
          q.mul(static_cast<std::uint32_t>(v), gens_[k]);
}

void CayleyOperator::apply(const std::vector<double>& x,
                           std::vector<double>& y) const {
  std::uint64_t n = q_->order();
  std::size_t d = gens_.size();
  y.assign(n, 0.0);
  for (std::uint64_t v = 0; v < n; ++v) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += x[nbr_[v * d + k]];
    y[v] = acc / static_cast<double>(d);
  }
}

namespace {

// Largest eigenvalue of (A_S + I)/2 restricted to the complement of the
// constant vector, by deflated power iteration; returns lambda_2 of A_S.
double lambda2_power_iteration(const CayleyOperator& op) {
  std::uint64_t n = op.order();
  std::vector<double> x(n), y;
  // Deterministic start vector, deflated against the constant vector.
  for (std::uint64_t i = 0; i < n; ++i)
    x[i] = static_cast<double>((i * 2654435761ull) & 0xffffffffull) /
               4294967296.0 -
           0.5;
  auto deflate = [&](std::vector<double>& v) {
    double mean = 0.0;
    for (double t : v) mean += t;
    mean /= static_cast<double>(n);
    for (double& t : v) t -= mean;
  };
  auto norm = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
  };
  deflate(x);
  double nx = norm(x);
  if (nx == 0.0) x[0] = 1.0, x[n - 1] = -1.0, nx = std::sqrt(2.0);
  for (double& t : x) t /= nx;
  double prev = 2.0;
  for (long long it = 0; it < 1'000'000; ++it) {
    op.apply(x, y);
    for (std::uint64_t i = 0; i < n; ++i) y[i] = 0.5 * (y[i] + x[i]);
    deflate(y);
    double ny = norm(y);
    if (ny == 0.0) return -1.0;  // complement killed: lambda_2 = -1
    // Rayleigh quotient of (A+I)/2 at the current unit vector.
    double mu = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) mu += x[i] * y[i];
    for (std::uint64_t i = 0; i < n; ++i) x[i] = y[i] / ny;
    if (std::abs(mu - prev) <= 1e-10 * std::max(1.0, std::abs(mu)))
      return 2.0 * mu - 1.0;
    prev = mu;
  }
  throw UndecidedError("spectral_gap: power iteration did not converge", 0);
}

}  // namespace

SpectralReport spectral_gap(const FiniteQuotient& q,
                            const std::vector<GeneratorWord>& S) {
  if (q.order() < 2)
    throw PreconditionError("spectral_gap: quotient must have >= 2 elements");
  CayleyOperator op(q, S);
  SpectralReport rep;
  rep.generating = op.generating();
  std::uint64_t n = q.order();
  if (n <= 4096) {
    rep.dense = true;
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                              static_cast<Eigen::Index>(n));
    double w = 1.0 / static_cast<double>(op.degree());
    for (std::uint64_t v = 0; v < n; ++v)
      for (std::size_t k = 0; k < op.degree(); ++k)
        M(static_cast<Eigen::Index>(v),
          static_cast<Eigen::Index>(op.neighbor(
              static_cast<std::uint32_t>(v), k))) += w;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                      Eigen::EigenvaluesOnly);
    rep.eigenvalues.assign(es.eigenvalues().data(),
                           es.eigenvalues().data() + n);
    if (std::abs(rep.eigenvalues.back() - 1.0) > 1e-9)
      throw InconsistencyError(
          "spectral_gap: top eigenvalue of the row-stochastic operator is "
          "not 1");
    rep.lambda2 = rep.eigenvalues[n - 2];
  } else {
    rep.lambda2 = lambda2_power_iteration(op);
  }
  if (!rep.generating) {
    // The all-ones vector on the orbit of the identity, zero elsewhere, is a
    // second invariant vector, so lambda_2 = 1 exactly.
    rep.lambda2 = 1.0;
    rep.gap = 0.0;
    rep.warning =
        "generator images do not generate the quotient; lambda_2 = 1 and "
        "the diameter inequality is skipped";
    return rep;
  }
  rep.gap = 1.0 - rep.lambda2;
  DiameterResult dr = diameter(q, symmetrize(q, op.gen_indices()));
  rep.diameter = dr.diameter;
  rep.gap_lower_bound = 1.0 / (static_cast<double>(op.degree()) *
                           static_cast<double>(rep.diameter) *
                           static_cast<double>(rep.diameter));
  rep.inequality_checked = true;
  rep.inequality_holds = rep.gap + 1e-12 >= rep.gap_lower_bound;
  return rep;
}

namespace {

MixingReport mixing_exact(const CayleyOperator& op, long long max_iter) {
  std::uint64_t n = op.order();
  std::size_t d = op.degree();
  mpz_class n_z = static_cast<unsigned long>(n);
  // Numerators of f_l over the common denominator D_l = (2|S|)^l.
  std::vector<mpz_class> f(n, 0), g(n);
  f[0] = 1;
  mpz_class D = 1;
  MixingReport rep;
  rep.exact = true;
  // inf-distance at step l as the exact fraction num_l / (D_l * n).
  mpz_class prev_num = 0, prev_den = 0;
  auto record = [&](long long l) {
    mpz_class num = 0;
    for (std::uint64_t v = 0; v < n; ++v) {
      mpz_class dlt = abs(f[v] * n_z - D);
      if (dlt > num) num = dlt;
    }
    mpz_class den = D * n_z;
    mpq_class ratio(num, den);
    ratio.canonicalize();
    rep.trace.push_back(ratio.get_d());
    if (l > 0) {
      // Monotone non-increase: num/den <= prev_num/prev_den.
      if (num * prev_den > prev_num * den)
        throw InconsistencyError(
            "mixing_time: inf-distance to uniform increased at step " +
            std::to_string(l));
    }
    prev_num = num;
    prev_den = den;
    // Threshold: num / (D n) <= 1 / (2n)  <=>  2 num <= D.
    return 2 * num <= D;
  };
  record(0);
  for (long long l = 1; l <= max_iter; ++l) {
    mpz_class dz = static_cast<unsigned long>(d);
    for (std::uint64_t v = 0; v < n; ++v) {
      mpz_class acc = f[v] * dz;
      for (std::size_t k = 0; k < d; ++k)
        acc += f[op.neighbor(static_cast<std::uint32_t>(v), k)];
      g[v] = acc;
    }
    f.swap(g);
    D *= 2 * static_cast<unsigned long>(d);
    if (record(l)) {
      rep.time = l;
      return rep;
    }
  }
  throw UndecidedError("mixing_time: iteration cap exceeded",
                       static_cast<int>(std::min<long long>(
                           max_iter, std::numeric_limits<int>::max())));
}

MixingReport mixing_approx(const CayleyOperator& op, long long max_iter) {
  std::uint64_t n = op.order();
  std::size_t d = op.degree();
  std::vector<double> f(n, 0.0), g;
  f[0] = 1.0;
  double uniform = 1.0 / static_cast<double>(n);
  double threshold = 0.5 * uniform;
  double err = 0.0;  // accumulated rounding bound
  double step_err =
      (static_cast<double>(d) + 2.0) * std::numeric_limits<double>::epsilon();
  MixingReport rep;
  rep.exact = false;
  double prev = 1.0 - uniform;
  rep.trace.push_back(prev);
  for (long long l = 1; l <= max_iter; ++l) {
    op.apply(f, g);
    for (std::uint64_t v = 0; v < n; ++v) f[v] = 0.5 * (f[v] + g[v]);
    err += step_err;
    double dist = 0.0;
    for (std::uint64_t v = 0; v < n; ++v)
      dist = std::max(dist, std::abs(f[v] - uniform));
    rep.trace.push_back(dist);
    if (dist > prev + err)
      throw InconsistencyError(
          "mixing_time: inf-distance to uniform increased at step " +
          std::to_string(l));
    prev = dist;
    if (dist + err <= threshold) {
      rep.time = l;
      return rep;
    }
  }
  throw UndecidedError("mixing_time: iteration cap exceeded",
                       static_cast<int>(std::min<long long>(
                           max_iter, std::numeric_limits<int>::max())));
}

}  // namespace

MixingReport mixing_time(const FiniteQuotient& q,
                         const std::vector<GeneratorWord>& S,
                         long long max_iter) {
  if (q.order() == 1) {
    // f_0 is already uniform; the definition asks for the smallest
    // *positive* l, so the trivial group mixes at step 1.
    MixingReport rep;
    rep.time = 1;
    rep.exact = true;
    rep.trace = {0.0, 0.0};
    return rep;
  }
  CayleyOperator op(q, S);
  if (!op.generating())
    throw PreconditionError(
        "mixing_time: generator images do not generate the quotient");
  return q.order() <= 4096 ? mixing_exact(op, max_iter)
                           : mixing_approx(op, max_iter);
}

namespace {

void check_symmetric_words(const std::vector<GeneratorWord>& S) {
  // Every generator must have its inverse in S (as a reduced word); this is
  // the word-level check used by the infinite-group ball enumerators.
  for (const auto& w : S) {
    GeneratorWord wi = inverse(w);
    bool found = false;
    for (const auto& v : S)
      if (reduce(v) == reduce(wi)) {
        found = true;
        break;
      }
    if (!found)
      throw PreconditionError("generating multiset is not symmetric: '" +
                              w.str() + "' has no inverse in S");
  }
}

}  // namespace

GrowthTable growth(GroupSpec group, const std::vector<GeneratorWord>& S,
                   int n, int hash_level) {
  if (n < 0) throw PreconditionError("growth: negative radius");
  check_symmetric_words(S);
  GrowthTable table;
  table.level_used = 0;
  std::vector<GeneratorWord> elems{GeneratorWord(group)};
  std::unordered_map<std::string, std::vector<std::size_t>> buckets;
  buckets[level_permutation(elems[0], hash_level).csv()].push_back(0);
  std::vector<std::size_t> frontier{0};
  table.sizes.push_back(1);
  for (int r = 1; r <= n; ++r) {
    std::vector<std::size_t> next;
    for (std::size_t id : frontier) {
      for (const auto& s : S) {
        GeneratorWord cand = concat(elems[id], s);
        std::string key = level_permutation(cand, hash_level).csv();
        auto& bucket = buckets[key];
        bool dup = false;
        for (std::size_t other : bucket) {
          try {
            if (is_identity(concat(cand, inverse(elems[other])))) {
              dup = true;
              break;
            }
          } catch (const UndecidedError& e) {
            throw UndecidedError("growth: word problem undecided for the "
                                 "pair '" +
                                     cand.str() + "' vs '" +
                                     elems[other].str() + "'",
                                 e.depth_reached);
          }
        }
        if (!dup) {
          bucket.push_back(elems.size());
          next.push_back(elems.size());
          elems.push_back(std::move(cand));
        }
      }
    }
    table.sizes.push_back(elems.size());
    frontier = std::move(next);
  }
  return table;
}

namespace {

// Ball sizes with equality decided as level-N permutations only.
std::vector<std::uint64_t> growth_at_level(GroupSpec group,
                                           const std::vector<GeneratorWord>& S,
                                           int n, int N) {
  std::vector<GeneratorWord> frontier{GeneratorWord(group)};
  std::unordered_map<std::string, bool> seen;
  seen[level_permutation(frontier[0], N).csv()] = true;
  std::vector<std::uint64_t> sizes{1};
  std::uint64_t total = 1;
  for (int r = 1; r <= n; ++r) {
    std::vector<GeneratorWord> next;
    for (const auto& w : frontier) {
      for (const auto& s : S) {
        GeneratorWord cand = concat(w, s);
        std::string key = level_permutation(cand, N).csv();
        if (!seen.emplace(key, true).second) continue;
        ++total;
        next.push_back(std::move(cand));
      }
    }
    sizes.push_back(total);
    frontier = std::move(next);
  }
  return sizes;
}

}  // namespace

GrowthTable growth_stabilized(GroupSpec group,
                              const std::vector<GeneratorWord>& S, int n,
                              int start_level, int max_level) {
  if (n < 0) throw PreconditionError("growth_stabilized: negative radius");
  check_symmetric_words(S);
  std::vector<std::uint64_t> prev = growth_at_level(group, S, n, start_level);
  for (int N = start_level + 1; N <= max_level; ++N) {
    std::vector<std::uint64_t> cur = growth_at_level(group, S, n, N);
    if (cur == prev) {
      GrowthTable table;
      table.sizes = std::move(cur);
      table.level_used = N;
      return table;
    }
    prev = std::move(cur);
  }
  throw UndecidedError(
      "growth_stabilized: ball sizes did not stabilize by the level cap",
      max_level);
}

GrowthDiameterCheck growth_diameter_check(GroupSpec group,
                                          const std::vector<GeneratorWord>& S,
                                          int level) {
  check_symmetric_words(S);
  FiniteQuotient q = enumerate(group, S, level);
  DiameterResult dr = diameter_words(q, S);
  GrowthDiameterCheck check;
  check.level = level;
  check.quotient_order = q.order();
  check.diameter = dr.diameter;
  GrowthTable table = growth(group, S, dr.diameter);
  check.ball_size = table.sizes[static_cast<std::size_t>(dr.diameter)];
  check.holds = check.ball_size >= check.quotient_order;
  return check;
}

GrowthExponentReport growth_exponent_report() {
  GrowthExponentReport rep;
  // Bisection for the root of X^3 + X^2 + X - 2 in (0, 1).
  double lo = 0.0, hi = 1.0;
  auto f = [](double x) { return x * x * x + x * x + x - 2.0; };
  while (hi - lo > 1e-12) {
    double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  rep.eta = 0.5 * (lo + hi);
  rep.beta = std::log(2.0) / (std::log(2.0) - std::log(rep.eta));
  rep.grig_beta_lower = std::log(2.0) / std::log(35.0);
  rep.log35_over_log2 = std::log(35.0) / std::log(2.0);
  return rep;
}

}  // namespace branchdiam
