#include "torusnf/clusters.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>

#include "torusnf/intlattice.hpp"

namespace torusnf {

IntegerModule module_of(const std::vector<VecI>& edges, int d) {
  return IntegerModule{saturate_lattice(edges, d)};
}

ModuleSplit project(const VecI& xi, const IntegerModule& mod, const MetricTensor& m) {
  const int d = m.dim();
  const Vec x = xi.cast<double>();
  if (mod.trivial()) return ModuleSplit{Vec::Zero(d), x};
  const int r = mod.rank();
  Mat b(r, d);
  for (int i = 0; i < r; ++i) b.row(i) = mod.basis[i].cast<double>().transpose();
  // Normal equations for the g^AB-orthogonal projection onto span_R(basis).
  const Mat gram = b * m.g_inv() * b.transpose();
  const Vec rhs = b * m.g_inv() * x;
  const Vec coef = gram.ldlt().solve(rhs);
  Vec xi_m = b.transpose() * coef;
  return ModuleSplit{xi_m, x - xi_m};
}

std::vector<ResonanceEdge> resonance_graph(const ModeSet& modes, const NFParams& p) {
  {
    const auto errs = validate_params(p);
    if (!errs.empty()) throw std::invalid_argument("invalid parameters for resonance graph");
  }
  const MetricTensor& m = modes.metric();
  const int d = modes.dim();

  // Candidate fibers: 0 < |k| <= Lambda^epsilon, one representative per {k,-k}.
  const double kmax = std::pow(modes.lambda(), p.epsilon);
  std::vector<VecI> fibers;
  {
    std::vector<int> hi(d);
    for (int a = 0; a < d; ++a)
      hi[a] = static_cast<int>(std::floor(std::sqrt(std::max(0.0, kmax * kmax * m.g()(a, a))) + 1e-9));
    VecI k(d);
    std::vector<int> idx(d, 0);
    for (int a = 0; a < d; ++a) idx[a] = -hi[a];
    while (true) {
      for (int a = 0; a < d; ++a) k[a] = idx[a];
      bool lex_positive = false;
      for (int a = 0; a < d; ++a) {
        if (k[a] > 0) { lex_positive = true; break; }
        if (k[a] < 0) break;
      }
      if (lex_positive && std::sqrt(norm_sq(k, m)) <= kmax) fibers.push_back(k);
      int a = d - 1;
      while (a >= 0 && idx[a] == hi[a]) { idx[a] = -hi[a]; --a; }
      if (a < 0) break;
      ++idx[a];
    }
  }

  std::vector<ResonanceEdge> edges;
  for (int i = 0; i < modes.size(); ++i) {
    for (const VecI& k : fibers) {
      const auto j = modes.index_of(VecI(modes.mode(i) + k));
      if (!j || *j < i) continue;  // each undirected edge once
      const Covector eta = Covector::midpoint(modes.mode(i), k);
      if (normal_form_support(eta, k, p, m))
        edges.push_back(ResonanceEdge{std::min(i, *j), std::max(i, *j),
                                      *j > i ? k : VecI(-k)});
    }
  }
  return edges;
}

ClusterPartition build_partition(const ModeSet& modes, const NFParams& p) {
  const int n = modes.size();
  const auto edges = resonance_graph(modes, p);

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& e : edges) {
    const int a = find(e.i), b = find(e.j);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }

  ClusterPartition part;
  part.block_of.assign(n, -1);
  std::vector<int> root_to_block(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_to_block[r] < 0) {
      root_to_block[r] = static_cast<int>(part.blocks.size());
      part.blocks.emplace_back();
    }
    part.block_of[i] = root_to_block[r];
    part.blocks[root_to_block[r]].members.push_back(i);
  }
  for (const auto& e : edges) {
    auto& ks = part.blocks[part.block_of[e.i]].edge_ks;
    bool seen = false;
    for (const auto& q : ks)
      if (q == e.k || q == VecI(-e.k)) { seen = true; break; }
    if (!seen) ks.push_back(e.k);
  }

  const int d = modes.dim();
  double best_jap = std::numeric_limits<double>::infinity();
  for (auto& blk : part.blocks) {
    blk.module = module_of(blk.edge_ks, d);
    const ModuleSplit split = project(modes.mode(blk.members.front()), blk.module,
                                      modes.metric());
    blk.xi_perp = split.xi_perp;
    blk.ell = jap_bracket(blk.xi_perp, modes.metric());

    part.stats.max_block_size =
        std::max(part.stats.max_block_size, static_cast<int>(blk.members.size()));
    if (blk.members.size() == 1) ++part.stats.singletons;
    if (blk.module.full(d)) {
      ++part.stats.full_rank_components;
      double jb = std::numeric_limits<double>::infinity();
      for (int i : blk.members) jb = std::min(jb, modes.jap(i));
      if (jb < best_jap) {
        best_jap = jb;
        part.stats.n_star = static_cast<long>(blk.members.size());
      }
    }
  }
  return part;
}

PartitionVerification verify_partition(const ClusterPartition& part, const ModeSet& modes,
                                       const NFParams& p, const std::vector<double>& sigmas) {
  PartitionVerification v;
  const int d = modes.dim();
  for (double s : sigmas) v.k_sigma[s] = 0.0;

  for (const auto& blk : part.blocks) {
    v.size_histogram[static_cast<int>(blk.members.size())]++;
    const bool nontrivial = blk.module.nontrivial(d);
    for (int i : blk.members) {
      const ModuleSplit split = project(modes.mode(i), blk.module, modes.metric());
      const double xim_norm = std::sqrt(std::max(0.0, norm_sq(split.xi_m, modes.metric())));
      if (nontrivial) {
        const Vec dev = split.xi_perp - blk.xi_perp;
        v.p3_spread = std::max(v.p3_spread, std::sqrt(std::max(0.0, norm_sq(dev, modes.metric()))));
        v.k_hat = std::max(v.k_hat, xim_norm / std::pow(modes.jap(i), p.delta_star()));
        v.c_hat = std::max(v.c_hat, xim_norm / blk.ell);
      }
      for (double s : sigmas)
        v.k_sigma[s] = std::max(v.k_sigma[s], std::pow(modes.jap(i) / blk.ell, s));
    }
  }
  return v;
}

std::uint64_t partition_cache_key(const ModeSet& modes, const NFParams& p) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  const int d = modes.dim();
  h = fnv1a64_value(d, h);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) h = fnv1a64_value(modes.metric().g()(i, j), h);
  h = fnv1a64_value(modes.lambda(), h);
  h = fnv1a64_value(p.delta, h);
  h = fnv1a64_value(p.epsilon, h);
  h = fnv1a64_value(p.tau, h);
  return h;
}

namespace {
constexpr std::uint32_t kPartMagic = 0x544e4650;  // "TNFP"
constexpr std::uint32_t kPartVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
bool get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return bool(is);
}
}  // namespace

void save_partition(const std::filesystem::path& path, const ClusterPartition& part,
                    std::uint64_t key) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  put(os, kPartMagic);
  put(os, kPartVersion);
  put(os, key);
  put(os, static_cast<std::int64_t>(part.blocks.size()));
  for (const auto& blk : part.blocks) {
    const int d = static_cast<int>(blk.xi_perp.size());
    put(os, static_cast<std::int32_t>(d));
    put(os, static_cast<std::int32_t>(blk.module.rank()));
    for (const auto& b : blk.module.basis)
      for (int j = 0; j < d; ++j) put(os, static_cast<std::int32_t>(b[j]));
    put(os, static_cast<std::int64_t>(blk.members.size()));
    for (int i : blk.members) put(os, static_cast<std::int32_t>(i));
    put(os, static_cast<std::int64_t>(blk.edge_ks.size()));
    for (const auto& k : blk.edge_ks)
      for (int j = 0; j < d; ++j) put(os, static_cast<std::int32_t>(k[j]));
    put(os, blk.ell);
    for (int j = 0; j < d; ++j) put(os, blk.xi_perp[j]);
  }
  put(os, static_cast<std::int32_t>(part.stats.singletons));
  put(os, static_cast<std::int32_t>(part.stats.max_block_size));
  put(os, static_cast<std::int64_t>(part.stats.n_star));
  put(os, static_cast<std::int32_t>(part.stats.full_rank_components));
}

std::optional<ClusterPartition> load_partition(const std::filesystem::path& path,
                                               std::uint64_t key, int n_modes, int d) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::uint32_t magic = 0, version = 0;
  std::uint64_t stored = 0;
  if (!get(is, magic) || magic != kPartMagic) return std::nullopt;
  if (!get(is, version) || version != kPartVersion) return std::nullopt;
  if (!get(is, stored) || stored != key) return std::nullopt;

  std::int64_t nblocks = 0;
  if (!get(is, nblocks) || nblocks < 0) return std::nullopt;
  ClusterPartition part;
  part.block_of.assign(n_modes, -1);
  for (std::int64_t b = 0; b < nblocks; ++b) {
    ClusterBlock blk;
    std::int32_t dd = 0, rank = 0;
    if (!get(is, dd) || dd != d || !get(is, rank) || rank < 0 || rank > d) return std::nullopt;
    for (int i = 0; i < rank; ++i) {
      VecI row(d);
      for (int j = 0; j < d; ++j) {
        std::int32_t x;
        if (!get(is, x)) return std::nullopt;
        row[j] = x;
      }
      blk.module.basis.push_back(std::move(row));
    }
    std::int64_t nmem = 0;
    if (!get(is, nmem) || nmem <= 0) return std::nullopt;
    for (std::int64_t i = 0; i < nmem; ++i) {
      std::int32_t x;
      if (!get(is, x) || x < 0 || x >= n_modes) return std::nullopt;
      blk.members.push_back(x);
      part.block_of[x] = static_cast<int>(part.blocks.size());
    }
    std::int64_t nks = 0;
    if (!get(is, nks) || nks < 0) return std::nullopt;
    for (std::int64_t i = 0; i < nks; ++i) {
      VecI k(d);
      for (int j = 0; j < d; ++j) {
        std::int32_t x;
        if (!get(is, x)) return std::nullopt;
        k[j] = x;
      }
      blk.edge_ks.push_back(std::move(k));
    }
    if (!get(is, blk.ell)) return std::nullopt;
    blk.xi_perp = Vec(d);
    for (int j = 0; j < d; ++j)
      if (!get(is, blk.xi_perp[j])) return std::nullopt;
    part.blocks.push_back(std::move(blk));
  }
  std::int32_t singles = 0, maxsz = 0, fullrank = 0;
  std::int64_t nstar = 0;
  if (!get(is, singles) || !get(is, maxsz) || !get(is, nstar) || !get(is, fullrank))
    return std::nullopt;
  part.stats = {singles, maxsz, static_cast<long>(nstar), fullrank};
  for (int i = 0; i < n_modes; ++i)
    if (part.block_of[i] < 0) return std::nullopt;
  return part;
}

}  // namespace torusnf
