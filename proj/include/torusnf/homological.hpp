#pragma once

#include "torusnf/resonance.hpp"

namespace torusnf {

/// Solution of -i [-Delta_g, G] + nr = 0 on the nonresonant support.
struct HomologicalSolution {
  OperatorMatrix g;
  double residual_norm;
};

/// G(xi+k, xi) = nr(xi+k, xi) / (2i <eta|k>) with eta = xi + k/2. The divisor
/// is computed as (|xi+k|^2 - |xi|^2)/2, which equals 2<eta|k>/2 exactly and is
/// bit-consistent with the diagonal of laplacian_matrix, so the operator
/// identity holds entrywise to rounding. Hermitian nr gives Hermitian G.
/// Throws if a nonzero entry sits at a vanishing divisor.
HomologicalSolution solve_homological(const OperatorMatrix& nr);
BlockMatrix solve_homological(const BlockMatrix& nr);

/// Frobenius norm of -i [laplacian, G] + nr.
double residual(const OperatorMatrix& g, const OperatorMatrix& nr);
double residual(const BlockMatrix& g, const BlockMatrix& nr);

}  // namespace torusnf
