#pragma once

#include "torusnf/timegrid.hpp"
#include "torusnf/weyl.hpp"

namespace torusnf {

/// Partition of the mode set into groups closed under the operators of
/// interest: two modes share a group iff they are connected by some
/// interaction fiber. Operators block diagonal with respect to the partition
/// are stored and manipulated per group (see BlockMatrix), which turns the
/// dense pipeline into many small independent ones.
struct SupportPartition {
  ModeSetPtr modes;
  std::vector<std::vector<int>> groups;  // global mode indices, sorted
  std::vector<int> group_of;             // mode index -> group
  std::vector<int> local_of;             // mode index -> position inside group

  int count() const { return static_cast<int>(groups.size()); }
  int dim_of(int g) const { return static_cast<int>(groups[g].size()); }

  static std::shared_ptr<const SupportPartition> single_group(const ModeSetPtr& modes);
  /// Components of the graph with edges {xi, xi+k} over the given fibers.
  static std::shared_ptr<const SupportPartition> from_fibers(const ModeSetPtr& modes,
                                                             const std::vector<VecI>& fibers);
  /// Components of the union of the numeric supports of the given matrices.
  static std::shared_ptr<const SupportPartition> from_support(
      const std::vector<const MatC*>& mats, const ModeSetPtr& modes);
};

using PartitionPtr = std::shared_ptr<const SupportPartition>;

/// Block diagonal operator w.r.t. a SupportPartition.
struct BlockMatrix {
  PartitionPtr part;
  std::vector<MatC> blk;

  BlockMatrix() = default;
  explicit BlockMatrix(PartitionPtr p);

  static BlockMatrix diagonal(const PartitionPtr& p, const Vec& full_diag);
  /// Fails if the dense matrix has an entry across two groups.
  static BlockMatrix from_dense(const PartitionPtr& p, const OperatorMatrix& a);
  OperatorMatrix to_dense() const;

  int count() const { return static_cast<int>(blk.size()); }
  BlockMatrix& operator+=(const BlockMatrix& o);
  BlockMatrix& operator-=(const BlockMatrix& o);
  BlockMatrix& operator*=(double s);
  friend BlockMatrix operator+(BlockMatrix a, const BlockMatrix& b) { return a += b; }
  friend BlockMatrix operator-(BlockMatrix a, const BlockMatrix& b) { return a -= b; }

  double max_abs() const;
  double frobenius() const;
  double hermiticity_defect() const;
  /// max |entry| over entries whose midpoint bracket is <= lambda_inner.
  double max_abs_inner(double lambda_inner) const;
};

/// e^{i tau G} A e^{-i tau G} per group through the eigendecomposition of G.
BlockMatrix conjugate(const BlockMatrix& a, const BlockMatrix& g, double tau);

/// Increment of one Lie-transform application per group:
///   e^{iG} H e^{-iG} - H - sum_q w_q e^{i tau_q G} dG e^{-i tau_q G},
/// all factors evaluated in the eigenbasis of G (a single transform pair).
/// Returning the increment instead of the transformed operator keeps the
/// large diagonal of H out of the remainder bookkeeping.
BlockMatrix lie_transform_delta(const BlockMatrix& h, const BlockMatrix& g,
                                const BlockMatrix& dg, const Quadrature& quad);

/// Unitary e^{i tau G} itself, per group.
BlockMatrix exponential(const BlockMatrix& g, double tau);

BlockMatrix multiply(const BlockMatrix& a, const BlockMatrix& b);
BlockMatrix adjoint(const BlockMatrix& a);
/// max over groups of ||U U^H - I||_F aggregated as a full Frobenius norm.
double unitarity_defect(const BlockMatrix& u);

/// Samples of a time dependent block operator on a TimeGrid; off-grid values
/// come from the grid's interpolation rule.
struct BlockFamily {
  PartitionPtr part;
  TimeGrid grid;
  std::vector<BlockMatrix> at;

  BlockFamily() = default;
  BlockFamily(PartitionPtr p, const TimeGrid& g);

  bool empty() const { return at.empty(); }
  BlockMatrix eval(double t) const;
  MatC eval_group(int grp, double t) const;
  /// Apply a sample-space derivative matrix (from TimeGrid::derivative_matrix).
  BlockFamily derivative(const Mat& d) const;
};

/// Quantize a symbol directly into block storage. Every fiber of the symbol
/// must connect modes inside a single group of the partition.
BlockMatrix quantize_blocks(const SymbolSpec& spec, double t, const PartitionPtr& part);

/// Block diagonal of |xi|^2.
BlockMatrix laplacian_blocks(const PartitionPtr& part);

/// Largest singular value of D^{sigma2} A D^{-sigma1} (exact max over groups).
double sobolev_opnorm(const BlockMatrix& a, double sigma1, double sigma2,
                      double tol = 1e-8);

}  // namespace torusnf
