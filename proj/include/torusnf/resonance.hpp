#pragma once

#include "torusnf/blockops.hpp"

namespace torusnf {

/// Normal-form parameters and the derived exponent delta* used by the block
/// partition bound.
struct NFParams {
  double delta = 0.0;
  double epsilon = 0.0;
  double tau = 0.0;
  double m = 0.0;
  int d = 0;

  double delta_star() const { return delta + d * (d + tau + 1) * epsilon; }
};

/// Empty list iff all parameter constraints hold; otherwise one entry naming
/// each violated inequality.
std::vector<std::string> validate_params(const NFParams& p);

/// Smooth even cutoff: 1 on |y| <= 1/2, 0 on |y| >= 1, and on the blend zone
/// f(2(1-|y|)) / (f(2(1-|y|)) + f(2(|y|-1/2))) with f(s) = exp(-1/s) for s > 0.
double chi(double y);

/// chi(2 |k|^tau <eta|k> / <eta>^delta), evaluated at the Weyl midpoint eta.
double chi_k(const Covector& eta, const VecI& k, const NFParams& p, const MetricTensor& m);

/// chi(|k| / <eta>^epsilon).
double tilde_chi_k(const Covector& eta, const VecI& k, const NFParams& p,
                   const MetricTensor& m);

/// The three fiber weights at one matrix entry; they sum to 1 up to rounding.
struct MaskWeights {
  double res, nr, smooth;
};
MaskWeights decomposition_weights(const Covector& eta, const VecI& k, const NFParams& p,
                                  const MetricTensor& m);

/// avg + res + nr + smooth = input entrywise; avg is the k = 0 fiber.
struct Decomposition {
  OperatorMatrix avg, res, nr, smooth;
};
Decomposition decompose(const OperatorMatrix& a, const NFParams& p);

struct BlockDecomposition {
  BlockMatrix avg, res, nr, smooth;
};
BlockDecomposition decompose(const BlockMatrix& a, const NFParams& p);

/// Support predicate of a normal-form operator at one fiber point:
/// |<eta|k>| <= <eta>^delta |k|^{-tau} and |k| <= <eta>^epsilon (k != 0).
bool normal_form_support(const Covector& eta, const VecI& k, const NFParams& p,
                         const MetricTensor& m);

/// True iff every nonzero entry at a fiber (k != 0, eta) satisfies the
/// support predicate at the midpoint.
bool is_normal_form(const OperatorMatrix& a, const NFParams& p);
bool is_normal_form(const BlockMatrix& a, const NFParams& p);

}  // namespace torusnf
