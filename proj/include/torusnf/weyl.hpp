#pragma once

#include <filesystem>
#include <optional>

#include "torusnf/modes.hpp"
#include "torusnf/symbols.hpp"

namespace torusnf {

/// Dense operator on the truncated mode set. Entry (row, col) with
/// row = index(xi + k), col = index(xi) carries the Weyl coefficient
/// v_hat_k(xi + k/2); the fiber view (k, midpoint eta) is recovered from the
/// row/col modes.
class OperatorMatrix {
 public:
  explicit OperatorMatrix(ModeSetPtr modes)
      : modes_(std::move(modes)),
        a_(MatC::Zero(modes_->size(), modes_->size())) {}
  OperatorMatrix(ModeSetPtr modes, MatC entries) : modes_(std::move(modes)), a_(std::move(entries)) {
    if (a_.rows() != modes_->size() || a_.cols() != modes_->size())
      throw std::invalid_argument("dimension mismatch");
  }

  int size() const { return static_cast<int>(a_.rows()); }
  const ModeSetPtr& modes_ptr() const { return modes_; }
  const ModeSet& modes() const { return *modes_; }
  const MatC& entries() const { return a_; }
  MatC& entries() { return a_; }

  Complex operator()(int i, int j) const { return a_(i, j); }

  double max_abs() const { return a_.size() ? a_.cwiseAbs().maxCoeff() : 0.0; }
  double frobenius() const { return a_.norm(); }
  /// max |A - A^H| entrywise; 0 for an exactly Hermitian matrix.
  double hermiticity_defect() const { return (a_ - a_.adjoint()).cwiseAbs().maxCoeff(); }

 private:
  ModeSetPtr modes_;
  MatC a_;
};

/// Truncated Weyl quantization: entry(xi+k, xi) = v_hat_k(t, xi + k/2).
/// Pairs with either endpoint outside the mode set are dropped.
OperatorMatrix quantize(const SymbolSpec& spec, double t, const ModeSetPtr& modes);

/// Diagonal of |xi|^2 (metric norm): the quantization of the principal symbol
/// of -Delta_g on the truncated set.
OperatorMatrix laplacian_matrix(const ModeSetPtr& modes);

/// Read off one fiber: returns all (eta = xi + k/2, entry(xi+k, xi)) with both
/// endpoints represented. quantize . dequantize is the identity on matrices
/// supported on represented fibers.
std::vector<std::pair<Covector, Complex>> dequantize(const OperatorMatrix& a, const VecI& k);

/// e^{i tau G} A e^{-i tau G} through the eigendecomposition of G, exploiting
/// the common invariant-subspace structure of A and G (connected components
/// of the union of their supports). Rejects non-Hermitian G.
OperatorMatrix conjugate_exact(const OperatorMatrix& a, const OperatorMatrix& g, double tau);

/// Truncated Lie expansion sum_{j=0}^{N} (i tau)^j Ad_G^j(A) / j!.
OperatorMatrix lie_series(const OperatorMatrix& a, const OperatorMatrix& g, double tau, int n);

/// Largest singular value of D^{sigma2} A D^{-sigma1}, D = diag(<xi>), by
/// power iteration on the normal operator to relative tolerance `tol`.
double sobolev_opnorm(const OperatorMatrix& a, double sigma1, double sigma2,
                      double tol = 1e-6, int max_iter = 20000);

/// Versioned binary container for matrices (cache format).
void save_matrix(const std::filesystem::path& path, const OperatorMatrix& a);
std::optional<OperatorMatrix> load_matrix(const std::filesystem::path& path,
                                          const ModeSetPtr& modes);

}  // namespace torusnf
