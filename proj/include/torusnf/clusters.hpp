#pragma once

#include <filesystem>
#include <map>
#include <optional>

#include "torusnf/resonance.hpp"

namespace torusnf {

/// Saturated subgroup of Z^d in canonical Hermite basis form.
struct IntegerModule {
  std::vector<VecI> basis;  // row HNF of the saturated lattice

  int rank() const { return static_cast<int>(basis.size()); }
  bool trivial() const { return basis.empty(); }
  bool full(int d) const { return rank() == d; }
  /// Nontrivial in the block-geography sense: neither {0} nor Z^d.
  bool nontrivial(int d) const { return rank() >= 1 && rank() < d; }
};

/// Module generated by a set of difference vectors: basis of
/// span_R(edges) intersected with Z^d. Independent of edge order.
IntegerModule module_of(const std::vector<VecI>& edges, int d);

/// Metric-orthogonal splitting xi = xi_M + xi_perp with xi_M in span_R(M).
struct ModuleSplit {
  Vec xi_m;
  Vec xi_perp;
};
ModuleSplit project(const VecI& xi, const IntegerModule& mod, const MetricTensor& m);

struct ResonanceEdge {
  int i, j;  // mode indices, i < j
  VecI k;    // j = i + k
};

/// Undirected edges {xi, xi+k} wherever the normal-form support predicate
/// holds at the midpoint: exactly the positions where a normal-form operator
/// may have a nonzero entry, so such operators are block diagonal on the
/// connected components.
std::vector<ResonanceEdge> resonance_graph(const ModeSet& modes, const NFParams& p);

struct ClusterBlock {
  IntegerModule module;
  std::vector<int> members;      // mode indices
  std::vector<VecI> edge_ks;     // distinct connecting fibers
  double ell = 1.0;              // <xi_perp>, block constant
  Vec xi_perp;                   // transversal component of the first member
};

struct ClusterPartition {
  std::vector<ClusterBlock> blocks;
  std::vector<int> block_of;

  struct Stats {
    int singletons = 0;
    int max_block_size = 0;
    long n_star = 0;              // cardinality of the full-module block
    int full_rank_components = 0;
  } stats;
};

ClusterPartition build_partition(const ModeSet& modes, const NFParams& p);

/// Empirical check of the structural properties of the partition.
struct PartitionVerification {
  double p3_spread = 0.0;  // max deviation of xi_perp within nontrivial blocks
  double k_hat = 0.0;      // max |xi_M| / <xi>^{delta*} over nontrivial blocks
  double c_hat = 0.0;      // max |xi_M| / ell over nontrivial blocks
  std::map<double, double> k_sigma;    // sigma -> max (<xi>/ell)^sigma
  std::map<int, int> size_histogram;   // block size -> count
};

PartitionVerification verify_partition(const ClusterPartition& part, const ModeSet& modes,
                                       const NFParams& p, const std::vector<double>& sigmas);

/// Binary cache keyed by (metric, lambda, delta, epsilon, tau); loading
/// ignores files whose key or format does not match.
std::uint64_t partition_cache_key(const ModeSet& modes, const NFParams& p);
void save_partition(const std::filesystem::path& path, const ClusterPartition& part,
                    std::uint64_t key);
std::optional<ClusterPartition> load_partition(const std::filesystem::path& path,
                                               std::uint64_t key, int n_modes, int d);

}  // namespace torusnf
