#include "branchdiam/quotient.hpp"

#include <algorithm>
#include <cstring>
#include <deque>
#include <fstream>

namespace branchdiam {

namespace {

std::uint64_t pow_u64(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

int bits_for(std::uint64_t npoints) {
  int b = 1;
  while ((std::uint64_t{1} << b) < npoints) ++b;
  return b;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t hash_buffer(const std::uint64_t* data, std::uint64_t n) {
  std::uint64_t h = 0x2545f4914f6cdd1dULL;
  for (std::uint64_t i = 0; i < n; ++i) h = splitmix64(h ^ data[i]);
  return h;
}

}  // namespace

FiniteQuotient::FiniteQuotient(GroupSpec group, int level,
                               std::vector<GeneratorWord> gen_words)
    : group_(group),
      level_(level),
      npoints_(pow_u64(group.prime, level)),
      bits_(bits_for(npoints_)),
      words_per_elem_((npoints_ * bits_ + 63) / 64),
      gen_words_(std::move(gen_words)) {}

std::uint32_t FiniteQuotient::image_at(std::uint64_t elem,
                                       std::uint64_t point) const {
  const std::uint64_t base = elem * words_per_elem_;
  const std::uint64_t bitpos = point * bits_;
  const std::uint64_t word = bitpos >> 6;
  const int off = static_cast<int>(bitpos & 63);
  std::uint64_t v = arena_[base + word] >> off;
  if (off + bits_ > 64) v |= arena_[base + word + 1] << (64 - off);
  return static_cast<std::uint32_t>(v & ((std::uint64_t{1} << bits_) - 1));
}

void FiniteQuotient::pack_into(std::uint64_t elem,
                               const std::vector<std::uint32_t>& images) {
  const std::uint64_t base = elem * words_per_elem_;
  for (std::uint64_t w = 0; w < words_per_elem_; ++w) arena_[base + w] = 0;
  for (std::uint64_t point = 0; point < npoints_; ++point) {
    const std::uint64_t bitpos = point * bits_;
    const std::uint64_t word = bitpos >> 6;
    const int off = static_cast<int>(bitpos & 63);
    arena_[base + word] |= static_cast<std::uint64_t>(images[point]) << off;
    if (off + bits_ > 64)
      arena_[base + word + 1] |=
          static_cast<std::uint64_t>(images[point]) >> (64 - off);
  }
}

std::uint64_t FiniteQuotient::hash_of(std::uint64_t elem) const {
  return hash_buffer(arena_.data() + elem * words_per_elem_, words_per_elem_);
}

bool FiniteQuotient::equal_elems(std::uint64_t i,
                                 const std::vector<std::uint64_t>& buf) const {
  return std::memcmp(arena_.data() + i * words_per_elem_, buf.data(),
                     words_per_elem_ * sizeof(std::uint64_t)) == 0;
}

void FiniteQuotient::rehash(std::uint64_t min_slots) {
  std::uint64_t n = 16;
  while (n < min_slots) n <<= 1;
  slots_.assign(n, 0);
  slot_mask_ = n - 1;
  for (std::uint64_t i = 0; i < count_; ++i) {
    std::uint64_t h = hash_of(i) & slot_mask_;
    while (slots_[h]) h = (h + 1) & slot_mask_;
    slots_[h] = static_cast<std::uint32_t>(i + 1);
  }
}

std::pair<std::uint32_t, bool> FiniteQuotient::find_or_insert(
    const std::vector<std::uint64_t>& packed) {
  if ((count_ + 1) * 10 >= slots_.size() * 7) rehash((count_ + 1) * 2);
  std::uint64_t h = hash_buffer(packed.data(), words_per_elem_) & slot_mask_;
  while (slots_[h]) {
    const std::uint32_t idx = slots_[h] - 1;
    if (equal_elems(idx, packed)) return {idx, false};
    h = (h + 1) & slot_mask_;
  }
  arena_.insert(arena_.end(), packed.begin(), packed.end());
  const std::uint32_t idx = static_cast<std::uint32_t>(count_++);
  slots_[h] = idx + 1;
  return {idx, true};
}

std::optional<std::uint32_t> FiniteQuotient::find_packed(
    const std::vector<std::uint64_t>& packed) const {
  if (slots_.empty()) return std::nullopt;
  std::uint64_t h = hash_buffer(packed.data(), words_per_elem_) & slot_mask_;
  while (slots_[h]) {
    const std::uint32_t idx = slots_[h] - 1;
    if (equal_elems(idx, packed)) return idx;
    h = (h + 1) & slot_mask_;
  }
  return std::nullopt;
}

std::uint32_t FiniteQuotient::mul(std::uint32_t i, std::uint32_t j) const {
  thread_local std::vector<std::uint32_t> images;
  thread_local std::vector<std::uint64_t> packed;
  images.resize(npoints_);
  for (std::uint64_t k = 0; k < npoints_; ++k)
    images[k] = image_at(j, image_at(i, k));
  packed.assign(words_per_elem_, 0);
  for (std::uint64_t point = 0; point < npoints_; ++point) {
    const std::uint64_t bitpos = point * bits_;
    const std::uint64_t word = bitpos >> 6;
    const int off = static_cast<int>(bitpos & 63);
    packed[word] |= static_cast<std::uint64_t>(images[point]) << off;
    if (off + bits_ > 64)
      packed[word + 1] |= static_cast<std::uint64_t>(images[point]) >> (64 - off);
  }
  auto idx = find_packed(packed);
  if (!idx)
    throw InconsistencyError("product fell outside the enumerated quotient");
  return *idx;
}

std::uint32_t FiniteQuotient::inv(std::uint32_t i) const {
  thread_local std::vector<std::uint32_t> images;
  thread_local std::vector<std::uint64_t> packed;
  images.resize(npoints_);
  for (std::uint64_t k = 0; k < npoints_; ++k) images[image_at(i, k)] =
      static_cast<std::uint32_t>(k);
  packed.assign(words_per_elem_, 0);
  for (std::uint64_t point = 0; point < npoints_; ++point) {
    const std::uint64_t bitpos = point * bits_;
    const std::uint64_t word = bitpos >> 6;
    const int off = static_cast<int>(bitpos & 63);
    packed[word] |= static_cast<std::uint64_t>(images[point]) << off;
    if (off + bits_ > 64)
      packed[word + 1] |= static_cast<std::uint64_t>(images[point]) >> (64 - off);
  }
  auto idx = find_packed(packed);
  if (!idx)
    throw InconsistencyError("inverse fell outside the enumerated quotient");
  return *idx;
}

std::optional<std::uint32_t> FiniteQuotient::index_of(
    const LevelPermutation& p) const {
  if (p.level != level_ || p.prime != group_.prime)
    throw InconsistencyError("permutation level/prime mismatch");
  std::vector<std::uint64_t> packed(words_per_elem_, 0);
  for (std::uint64_t point = 0; point < npoints_; ++point) {
    const std::uint64_t bitpos = point * bits_;
    const std::uint64_t word = bitpos >> 6;
    const int off = static_cast<int>(bitpos & 63);
    packed[word] |= static_cast<std::uint64_t>(p.perm[point]) << off;
    if (off + bits_ > 64)
      packed[word + 1] |= static_cast<std::uint64_t>(p.perm[point]) >> (64 - off);
  }
  return find_packed(packed);
}

LevelPermutation FiniteQuotient::perm_of(std::uint32_t i) const {
  LevelPermutation p{group_.prime, level_,
                     std::vector<std::uint32_t>(npoints_)};
  for (std::uint64_t k = 0; k < npoints_; ++k) p.perm[k] = image_at(i, k);
  return p;
}

FiniteQuotient enumerate(GroupSpec group, const std::vector<GeneratorWord>& gens,
                         int n, std::uint64_t max_elements,
                         std::uint64_t max_leaves) {
  FiniteQuotient q(group, n, gens);
  if (q.npoints_ > max_leaves)
    throw CapExceededError("level leaf count exceeds the cap", q.npoints_);

  // Generator images as unpacked permutations, deduplicated for expansion.
  std::vector<std::vector<std::uint32_t>> gen_imgs;
  std::vector<std::uint32_t> ident(q.npoints_);
  for (std::uint64_t i = 0; i < q.npoints_; ++i)
    ident[i] = static_cast<std::uint32_t>(i);

  // Insert the identity at index 0.
  std::vector<std::uint64_t> packed(q.words_per_elem_, 0);
  auto pack = [&](const std::vector<std::uint32_t>& images) {
    std::fill(packed.begin(), packed.end(), 0);
    for (std::uint64_t point = 0; point < q.npoints_; ++point) {
      const std::uint64_t bitpos = point * q.bits_;
      const std::uint64_t word = bitpos >> 6;
      const int off = static_cast<int>(bitpos & 63);
      packed[word] |= static_cast<std::uint64_t>(images[point]) << off;
      if (off + q.bits_ > 64)
        packed[word + 1] |=
            static_cast<std::uint64_t>(images[point]) >> (64 - off);
    }
  };
  pack(ident);
  q.find_or_insert(packed);

  for (const GeneratorWord& g : gens) {
    LevelPermutation p = level_permutation(g, n, max_leaves);
    std::vector<std::uint32_t> imgs(p.perm.begin(), p.perm.end());
    bool seen = false;
    for (const auto& existing : gen_imgs)
      if (existing == imgs) {
        seen = true;
        break;
      }
    if (!seen) gen_imgs.push_back(imgs);
  }

  std::vector<std::uint32_t> frontier = {0};
  std::vector<std::uint32_t> scratch(q.npoints_);
  while (!frontier.empty()) {
    // Collect this level's new elements, then insert them in packed-buffer
    // lexicographic order for deterministic indexing.
    std::vector<std::vector<std::uint64_t>> candidates;
    for (std::uint32_t u : frontier) {
      for (const auto& gi : gen_imgs) {
        for (std::uint64_t k = 0; k < q.npoints_; ++k)
          scratch[k] = gi[q.image_at(u, k)];
        pack(scratch);
        if (!q.find_packed(packed)) candidates.push_back(packed);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    frontier.clear();
    for (const auto& c : candidates) {
      if (q.count_ >= max_elements)
        throw CapExceededError("quotient enumeration exceeded the element cap",
                               q.count_);
      frontier.push_back(q.find_or_insert(c).first);
    }
  }

  for (const GeneratorWord& g : gens) {
    LevelPermutation p = level_permutation(g, n, max_leaves);
    auto idx = q.index_of(p);
    if (!idx) throw InconsistencyError("generator image missing after closure");
    q.gen_index_.push_back(*idx);
  }
  return q;
}

void FiniteQuotient::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open cache file for writing: " + path);
  const char magic[4] = {'B', 'D', 'Q', '1'};
  out.write(magic, 4);
  auto w32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
  auto w64 = [&](std::uint64_t v) { out.write(reinterpret_cast<char*>(&v), 8); };
  w32(group_.family == Family::Grigorchuk ? 0 : 1);
  w32(static_cast<std::uint32_t>(group_.prime));
  w32(static_cast<std::uint32_t>(level_));
  w64(count_);
  w32(static_cast<std::uint32_t>(gen_words_.size()));
  for (const GeneratorWord& g : gen_words_) {
    std::string s = g.str();
    w32(static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  for (std::uint32_t gi : gen_index_) w32(gi);
  out.write(reinterpret_cast<const char*>(arena_.data()),
            static_cast<std::streamsize>(arena_.size() * 8));
}

FiniteQuotient FiniteQuotient::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open cache file: " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, "BDQ1", 4) != 0)
    throw Error("bad cache file format: " + path);
  auto r32 = [&] {
    std::uint32_t v;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
  };
  auto r64 = [&] {
    std::uint64_t v;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
  };
  const Family fam = r32() == 0 ? Family::Grigorchuk : Family::GuptaSidki;
  const int prime = static_cast<int>(r32());
  const int level = static_cast<int>(r32());
  const std::uint64_t count = r64();
  const std::uint32_t ngens = r32();
  GroupSpec spec = fam == Family::Grigorchuk ? GroupSpec::grigorchuk()
                                             : GroupSpec::gupta_sidki(prime);
  std::vector<GeneratorWord> gens;
  for (std::uint32_t i = 0; i < ngens; ++i) {
    std::uint32_t len = r32();
    std::string s(len, '\0');
    in.read(s.data(), len);
    gens.push_back(word_from_string(spec, s));
  }
  FiniteQuotient q(spec, level, gens);
  for (std::uint32_t i = 0; i < ngens; ++i) q.gen_index_.push_back(r32());
  q.count_ = count;
  q.arena_.resize(count * q.words_per_elem_);
  in.read(reinterpret_cast<char*>(q.arena_.data()),
          static_cast<std::streamsize>(q.arena_.size() * 8));
  if (!in) throw Error("truncated cache file: " + path);
  q.rehash(count * 2);
  return q;
}

bool SubgroupHandle::contains_subgroup(const SubgroupHandle& other) const {
  for (std::uint32_t e : other.elements)
    if (!member[e]) return false;
  return true;
}

SubgroupHandle whole_group(const FiniteQuotient& q) {
  SubgroupHandle h;
  h.parent = &q;
  h.member.assign(q.order(), true);
  h.elements.resize(q.order());
  for (std::uint64_t i = 0; i < q.order(); ++i)
    h.elements[i] = static_cast<std::uint32_t>(i);
  h.gens = q.generator_indices();
  return h;
}

namespace {

// Closes h under right multiplication by h.gens, assuming elements before
// `stable_elems` are already closed under gens before `stable_gens`.
void close_subgroup(const FiniteQuotient& q, SubgroupHandle& h,
                    std::size_t stable_elems, std::size_t stable_gens) {
  // Multiply established elements by the newly added generators.
  for (std::size_t e = 0; e < stable_elems; ++e)
    for (std::size_t g = stable_gens; g < h.gens.size(); ++g) {
      std::uint32_t t = q.mul(h.elements[e], h.gens[g]);
      if (!h.member[t]) {
        h.member[t] = true;
        h.elements.push_back(t);
      }
    }
  // Multiply all queued elements by all generators.
  for (std::size_t e = stable_elems; e < h.elements.size(); ++e)
    for (std::uint32_t g : h.gens) {
      std::uint32_t t = q.mul(h.elements[e], g);
      if (!h.member[t]) {
        h.member[t] = true;
        h.elements.push_back(t);
      }
    }
}

}  // namespace

SubgroupHandle subgroup_from_indices(const FiniteQuotient& q,
                                     std::vector<std::uint32_t> gens) {
  SubgroupHandle h;
  h.parent = &q;
  h.member.assign(q.order(), false);
  h.member[q.identity()] = true;
  h.elements = {q.identity()};
  h.gens = std::move(gens);
  close_subgroup(q, h, 0, 0);
  return h;
}

SubgroupHandle subgroup_image(const FiniteQuotient& q,
                              const std::vector<GeneratorWord>& subgens) {
  std::vector<std::uint32_t> idx;
  for (const GeneratorWord& w : subgens) {
    auto i = q.index_of(level_permutation(w, q.level()));
    if (!i)
      throw InconsistencyError("subgroup generator image '" + w.str() +
                               "' not found in the quotient");
    idx.push_back(*i);
  }
  return subgroup_from_indices(q, idx);
}

SubgroupHandle normal_closure(const FiniteQuotient& q,
                              std::vector<std::uint32_t> seed) {
  SubgroupHandle h = subgroup_from_indices(q, std::move(seed));
  std::size_t swept = 0;
  while (swept < h.gens.size()) {
    const std::size_t upto = h.gens.size();
    const std::size_t old_elems = h.elements.size();
    std::size_t old_gens = h.gens.size();
    for (std::size_t g = swept; g < upto; ++g)
      for (std::uint32_t pg : q.generator_indices()) {
        std::uint32_t c = q.mul(q.mul(q.inv(pg), h.gens[g]), pg);
        if (!h.member[c]) {
          h.member[c] = true;
          h.elements.push_back(c);
          h.gens.push_back(c);
        }
      }
    close_subgroup(q, h, old_elems, old_gens);
    swept = upto;
  }
  return h;
}

std::vector<SubgroupHandle> lower_central_series(const FiniteQuotient& q) {
  std::vector<SubgroupHandle> chain;
  chain.push_back(whole_group(q));
  while (!chain.back().is_trivial()) {
    std::vector<std::uint32_t> seeds;
    for (std::uint32_t g : q.generator_indices())
      for (std::uint32_t h : chain.back().gens) {
        std::uint32_t c = q.mul(q.mul(q.inv(g), q.inv(h)), q.mul(g, h));
        if (c != q.identity()) seeds.push_back(c);
      }
    SubgroupHandle next = seeds.empty() ? subgroup_from_indices(q, {})
                                        : normal_closure(q, seeds);
    if (next.order() >= chain.back().order())
      throw InconsistencyError(
          "lower central series failed to descend (quotient not nilpotent?)");
    chain.push_back(std::move(next));
  }
  return chain;
}

std::vector<std::uint32_t> symmetrize(const FiniteQuotient& q,
                                      std::vector<std::uint32_t> gens) {
  std::vector<std::uint32_t> out = std::move(gens);
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out.push_back(q.inv(out[i]));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

DiameterResult diameter(const FiniteQuotient& q,
                        const std::vector<std::uint32_t>& gen_indices) {
  std::vector<std::int32_t> dist(q.order(), -1);
  std::deque<std::uint32_t> queue;
  dist[q.identity()] = 0;
  queue.push_back(q.identity());
  std::uint64_t reached = 1;
  DiameterResult r;
  r.ball_sizes = {1};
  while (!queue.empty()) {
    std::uint32_t u = queue.front();
    queue.pop_front();
    for (std::uint32_t g : gen_indices) {
      std::uint32_t v = q.mul(u, g);
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        ++reached;
        if (static_cast<std::size_t>(dist[v]) >= r.ball_sizes.size())
          r.ball_sizes.push_back(r.ball_sizes.back());
        ++r.ball_sizes.back();
        queue.push_back(v);
      }
    }
  }
  if (reached != q.order())
    throw NonGeneratingError("generator set reaches only a proper subgroup",
                             reached);
  r.diameter = static_cast<int>(r.ball_sizes.size()) - 1;
  return r;
}

DiameterResult diameter_words(const FiniteQuotient& q,
                              const std::vector<GeneratorWord>& S) {
  std::vector<std::uint32_t> idx;
  for (const GeneratorWord& w : S) {
    auto i = q.index_of(level_permutation(w, q.level()));
    if (!i)
      throw InconsistencyError("generator image '" + w.str() +
                               "' not found in the quotient");
    idx.push_back(*i);
  }
  return diameter(q, symmetrize(q, std::move(idx)));
}

namespace {

// Dense multiplication-table view of a small group, used by the worst-case
// diameter search so the same core serves both FiniteQuotient and CosetGroup.
struct DenseTable {
  std::uint64_t n = 0;
  std::vector<std::uint32_t> mul;  // n*n, row-major
  std::vector<std::uint32_t> inv;
  std::vector<std::uint32_t> gens;

  std::uint32_t m(std::uint32_t i, std::uint32_t j) const {
    return mul[static_cast<std::uint64_t>(i) * n + j];
  }
};

// BFS diameter with a caller-owned distance buffer; returns -1 when the set
// does not generate.
int bfs_diameter(const DenseTable& T, const std::vector<std::uint32_t>& gens,
                 std::vector<std::int32_t>& dist,
                 std::vector<std::uint32_t>& queue) {
  std::fill(dist.begin(), dist.end(), -1);
  queue.clear();
  dist[0] = 0;
  queue.push_back(0);
  std::uint64_t reached = 1;
  int diam = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::uint32_t u = queue[head];
    for (std::uint32_t g : gens) {
      std::uint32_t v = T.m(u, g);
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        diam = dist[v];
        ++reached;
        queue.push_back(v);
      }
    }
  }
  return reached == T.n ? diam : -1;
}

// Subgroup closure of the seed set inside a dense table (identity assumed).
std::vector<bool> table_subgroup(const DenseTable& T,
                                 std::vector<std::uint32_t> seeds) {
  std::vector<bool> member(T.n, false);
  std::vector<std::uint32_t> elems{0};
  member[0] = true;
  for (std::uint32_t s : seeds)
    if (!member[s]) {
      member[s] = true;
      elems.push_back(s);
    }
  // Ensure seeds include inverses, then close under right multiplication.
  for (std::size_t i = 1; i < elems.size(); ++i) {
    std::uint32_t iv = T.inv[elems[i]];
    if (!member[iv]) {
      member[iv] = true;
      elems.push_back(iv);
      seeds.push_back(iv);
    }
  }
  for (std::size_t head = 0; head < elems.size(); ++head)
    for (std::uint32_t s : seeds) {
      std::uint32_t v = T.m(elems[head], s);
      if (!member[v]) {
        member[v] = true;
        elems.push_back(v);
      }
    }
  return member;
}

int worst_case_diameter_core(const DenseTable& T, std::uint64_t set_budget) {
  const std::uint64_t n = T.n;
  if (n == 1) return 0;

  // The toolkit only produces finite p-groups; find p and insist on it.
  std::uint64_t m = n;
  std::uint64_t p = 2;
  while (m % p != 0) ++p;
  while (m % p == 0) m /= p;
  if (m != 1)
    throw UnsupportedOperationError(
        "worst-case diameter requires a p-group quotient");

  // Frattini subgroup G^p [G,G]: normal closure of generator commutators,
  // together with all p-th powers.
  std::vector<std::uint32_t> seeds;
  {
    std::vector<std::uint32_t> comms;
    for (std::uint32_t g : T.gens)
      for (std::uint32_t h : T.gens) {
        std::uint32_t c = T.m(T.m(T.inv[g], T.inv[h]), T.m(g, h));
        if (c != 0) comms.push_back(c);
      }
    // Close the commutators under conjugation by the generators.
    std::vector<bool> cseen(n, false);
    for (std::size_t head = 0; head < comms.size(); ++head) {
      std::uint32_t c = comms[head];
      if (cseen[c]) continue;
      cseen[c] = true;
      for (std::uint32_t g : T.gens) {
        std::uint32_t cc = T.m(T.m(T.inv[g], c), g);
        if (!cseen[cc]) comms.push_back(cc);
      }
    }
    for (std::uint64_t e = 0; e < n; ++e)
      if (cseen[static_cast<std::uint32_t>(e)])
        seeds.push_back(static_cast<std::uint32_t>(e));
    for (std::uint64_t e = 0; e < n; ++e) {
      std::uint32_t acc = 0;
      for (std::uint64_t k = 0; k < p; ++k)
        acc = T.m(acc, static_cast<std::uint32_t>(e));
      if (acc != 0) seeds.push_back(acc);
    }
  }
  std::vector<bool> fmember = table_subgroup(T, std::move(seeds));
  std::uint64_t forder = 0;
  for (bool b : fmember) forder += b ? 1 : 0;

  const std::uint64_t quot = n / forder;
  int d = 0;
  for (std::uint64_t t = quot; t > 1; t /= p) ++d;

  // Right cosets of the Frattini subgroup, minimal-index representatives.
  std::vector<std::uint32_t> coset_of(n, UINT32_MAX);
  std::vector<std::uint32_t> reps;
  for (std::uint64_t i = 0; i < n; ++i) {
    if (coset_of[i] != UINT32_MAX) continue;
    const std::uint32_t id = static_cast<std::uint32_t>(reps.size());
    reps.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t f = 0; f < n; ++f)
      if (fmember[f]) coset_of[T.m(static_cast<std::uint32_t>(i),
                                   static_cast<std::uint32_t>(f))] = id;
  }
  auto cmul = [&](std::uint32_t c1, std::uint32_t c2) {
    return coset_of[T.m(reps[c1], reps[c2])];
  };

  // Label each Frattini coset with a vector in F_p^d (elementary abelian).
  const std::uint64_t pc = reps.size();
  std::vector<std::vector<int>> label(pc);
  std::vector<bool> labeled(pc, false);
  label[0].assign(d, 0);
  labeled[0] = true;
  int next_dim = 0;
  for (std::uint32_t c = 1; c < pc; ++c) {
    if (labeled[c]) continue;
    const int dim = next_dim++;
    // Multiply every labeled coset by powers of the new basis coset.
    std::vector<std::uint32_t> old;
    for (std::uint32_t x = 0; x < pc; ++x)
      if (labeled[x]) old.push_back(x);
    for (std::uint32_t x : old) {
      std::uint32_t cur = x;
      for (std::uint64_t k = 1; k < p; ++k) {
        cur = cmul(cur, c);
        label[cur] = label[x];
        label[cur][dim] = static_cast<int>(k);
        labeled[cur] = true;
      }
    }
  }

  // Inverse-closed atoms grouped by Frattini-coset vector.
  auto vec_key = [&](const std::vector<int>& v) {
    std::uint64_t k = 0;
    for (int x : v) k = k * p + static_cast<std::uint64_t>(x);
    return k;
  };
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> classes(
      pow_u64(p, d));
  {
    std::vector<bool> seen(n, false);
    for (std::uint64_t e = 1; e < n; ++e) {
      std::uint32_t g = static_cast<std::uint32_t>(e);
      if (seen[g]) continue;
      std::uint32_t gi = T.inv[g];
      seen[g] = seen[gi] = true;
      std::uint32_t lo = std::min(g, gi), hi = std::max(g, gi);
      std::uint64_t k1 = vec_key(label[coset_of[lo]]);
      std::uint64_t k2 = vec_key(label[coset_of[hi]]);
      if (k1 != 0) classes[k1].push_back({lo, hi});
      if (k2 != 0 && k2 != k1) classes[k2].push_back({lo, hi});
    }
  }

  // Enumerate unordered independent d-subsets of nonzero vectors by DFS with
  // incremental Gaussian elimination over F_p.
  std::vector<std::vector<std::uint64_t>> bases;
  std::uint64_t total_sets = 0;
  const std::uint64_t nvec = pow_u64(p, d);
  std::vector<std::uint64_t> chosen;
  std::vector<std::vector<int>> echelon;
  auto decode = [&](std::uint64_t k) {
    std::vector<int> v(d);
    for (int i = d - 1; i >= 0; --i) {
      v[i] = static_cast<int>(k % p);
      k /= p;
    }
    return v;
  };
  auto reduce_vec = [&](std::vector<int> v) {
    for (const auto& row : echelon) {
      int pivot = -1;
      for (int i = 0; i < d; ++i)
        if (row[i] != 0) {
          pivot = i;
          break;
        }
      if (pivot < 0 || v[pivot] == 0) continue;
      // v -= (v[pivot]/row[pivot]) * row  over F_p
      long long rinv = 1;
      for (std::uint64_t k = 1; k < p; ++k)
        if (static_cast<std::uint64_t>(row[pivot]) * k % p == 1) rinv = static_cast<long long>(k);
      long long f = static_cast<long long>(v[pivot]) * rinv % static_cast<long long>(p);
      for (int i = 0; i < d; ++i)
        v[i] = static_cast<int>(((v[i] - f * row[i]) % static_cast<long long>(p) +
                                 static_cast<long long>(p)) %
                                static_cast<long long>(p));
    }
    return v;
  };
  auto dfs = [&](auto&& self, std::uint64_t start) -> void {
    if (static_cast<int>(chosen.size()) == d) {
      std::uint64_t combos = 1;
      for (std::uint64_t k : chosen) combos *= classes[k].size();
      if (combos == 0) return;
      total_sets += combos;
      bases.push_back(chosen);
      return;
    }
    for (std::uint64_t k = start; k < nvec; ++k) {
      if (classes[k].empty()) continue;
      std::vector<int> r = reduce_vec(decode(k));
      bool zero = true;
      for (int x : r)
        if (x) {
          zero = false;
          break;
        }
      if (zero) continue;
      echelon.push_back(r);
      chosen.push_back(k);
      self(self, k + 1);
      chosen.pop_back();
      echelon.pop_back();
    }
  };
  dfs(dfs, 1);
  if (total_sets > set_budget)
    throw CapExceededError("worst-case diameter candidate budget exceeded",
                           total_sets);

  int best = 0;
  std::vector<std::int32_t> dist(n);
  std::vector<std::uint32_t> queue;
  queue.reserve(n);
  std::vector<std::uint32_t> gens;
  for (const auto& basis : bases) {
    std::vector<std::size_t> pick(basis.size(), 0);
    for (;;) {
      gens.clear();
      for (std::size_t i = 0; i < basis.size(); ++i) {
        auto [lo, hi] = classes[basis[i]][pick[i]];
        gens.push_back(lo);
        if (hi != lo) gens.push_back(hi);
      }
      int dm = bfs_diameter(T, gens, dist, queue);
      if (dm > best) best = dm;
      // Advance the mixed-radix choice vector.
      std::size_t i = 0;
      while (i < basis.size() && ++pick[i] == classes[basis[i]].size()) {
        pick[i] = 0;
        ++i;
      }
      if (i == basis.size()) break;
    }
  }
  return best;
}

}  // namespace

int worst_case_diameter(const FiniteQuotient& q, std::uint64_t order_cap,
                        std::uint64_t set_budget) {
  const std::uint64_t n = q.order();
  if (n > order_cap)
    throw CapExceededError("worst-case diameter order cap exceeded", n);
  DenseTable T;
  T.n = n;
  T.mul.resize(n * n);
  T.inv.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    T.inv[i] = q.inv(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = 0; j < n; ++j)
      T.mul[i * n + j] = q.mul(static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(j));
  }
  T.gens = q.generator_indices();
  return worst_case_diameter_core(T, set_budget);
}

int worst_case_diameter(const CosetGroup& G,
                        const std::vector<std::uint32_t>& gen_cosets,
                        std::uint64_t order_cap, std::uint64_t set_budget) {
  const std::uint64_t n = G.order();
  if (n > order_cap)
    throw CapExceededError("worst-case diameter order cap exceeded", n);
  DenseTable T;
  T.n = n;
  T.mul.resize(n * n);
  T.inv.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    T.inv[i] = G.inv(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = 0; j < n; ++j)
      T.mul[i * n + j] = G.mul(static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(j));
  }
  T.gens = gen_cosets;
  return worst_case_diameter_core(T, set_budget);
}

StabilizationReport stabilized_index(GroupSpec group,
                                     const std::vector<GeneratorWord>& subgens,
                                     int n_min, int n_max,
                                     bool use_normal_closure,
                                     std::uint64_t max_elements) {
  StabilizationReport rep;
  rep.quantity = "subgroup index";
  for (int n = n_min; n <= n_max; ++n) {
    try {
      FiniteQuotient q = enumerate(group, standard_generators(group), n,
                                   max_elements);
      SubgroupHandle img;
      if (use_normal_closure) {
        std::vector<std::uint32_t> seed;
        for (const GeneratorWord& w : subgens) {
          auto i = q.index_of(level_permutation(w, n));
          if (!i) throw InconsistencyError("subgroup seed missing from quotient");
          seed.push_back(*i);
        }
        img = normal_closure(q, seed);
      } else {
        img = subgroup_image(q, subgens);
      }
      rep.values.push_back({n, img.index_in_parent()});
    } catch (const CapExceededError&) {
      break;  // partial reports allowed
    }
  }
  const std::size_t k = rep.values.size();
  if (k >= 2 && rep.values[k - 1].second == rep.values[k - 2].second) {
    rep.stabilized = true;
    rep.stable_value = rep.values[k - 1].second;
  }
  return rep;
}

CosetGroup::CosetGroup(const FiniteQuotient& q, const SubgroupHandle& N)
    : parent_(&q) {
  if (N.parent != &q)
    throw InconsistencyError("subgroup belongs to a different quotient");
  coset_id_.assign(q.order(), UINT32_MAX);
  for (std::uint64_t i = 0; i < q.order(); ++i) {
    if (coset_id_[i] != UINT32_MAX) continue;
    const std::uint32_t id = static_cast<std::uint32_t>(reps_.size());
    reps_.push_back(static_cast<std::uint32_t>(i));
    for (std::uint32_t m : N.elements)
      coset_id_[q.mul(static_cast<std::uint32_t>(i), m)] = id;
    if (coset_id_[i] != id)
      throw InconsistencyError("coset assignment failed; N not closed?");
  }
}

int covering_exponent(const CosetGroup& G, const std::vector<std::uint32_t>& X) {
  std::vector<std::int32_t> dist(G.order(), -1);
  std::vector<std::uint32_t> queue;
  queue.reserve(G.order());
  dist[G.identity()] = 0;
  queue.push_back(G.identity());
  std::uint64_t reached = 1;
  int ecc = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::uint32_t u = queue[head];
    for (std::uint32_t x : X) {
      std::uint32_t v = G.mul(u, x);
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        ecc = std::max(ecc, dist[v]);
        ++reached;
        queue.push_back(v);
      }
    }
  }
  if (reached != G.order())
    throw PreconditionError("covering set does not generate the quotient");
  return std::max(ecc, 1);
}

std::vector<int> CoverWitness::factor_sequence(std::uint32_t coset) const {
  std::vector<int> seq;
  while (edge[coset] >= 0) {
    seq.push_back(edge[coset]);
    coset = parent[coset];
  }
  std::reverse(seq.begin(), seq.end());
  return seq;
}

CoverWitness covering_exponent_witnessed(const CosetGroup& G,
                                         const std::vector<std::uint32_t>& X) {
  CoverWitness w;
  w.dist.assign(G.order(), -1);
  w.parent.assign(G.order(), 0);
  w.edge.assign(G.order(), -1);
  std::vector<std::uint32_t> queue;
  queue.reserve(G.order());
  w.dist[G.identity()] = 0;
  w.parent[G.identity()] = G.identity();
  queue.push_back(G.identity());
  std::uint64_t reached = 1;
  int ecc = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    std::uint32_t u = queue[head];
    for (std::size_t xi = 0; xi < X.size(); ++xi) {
      std::uint32_t v = G.mul(u, X[xi]);
      if (w.dist[v] < 0) {
        w.dist[v] = w.dist[u] + 1;
        w.parent[v] = u;
        w.edge[v] = static_cast<std::int32_t>(xi);
        ecc = std::max(ecc, w.dist[v]);
        ++reached;
        queue.push_back(v);
      }
    }
  }
  if (reached != G.order())
    throw PreconditionError("covering set does not generate the quotient");
  w.exponent = std::max(ecc, 1);
  return w;
}

}  // namespace branchdiam
