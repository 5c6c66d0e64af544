#pragma once

#include "torusnf/homological.hpp"

namespace torusnf {

struct NFOptions {
  int quad_nodes = 8;
  DerivScheme deriv = DerivScheme::automatic;
  double stop_floor = 1e-13;   // early stop when the remainder drops below this
  double herm_tol = 1e-8;      // abort threshold for Hermiticity drift
  double buffer = 0.25;        // inner annulus fraction for order fits
  bool keep_families = true;   // retain Z/R samples of intermediate steps
};

/// Least-squares order fit: slope of log(max |entry|) against log <eta> over
/// decile bins of the inner annulus.
struct OrderFit {
  double order = -std::numeric_limits<double>::infinity();
  double residual = 0.0;
  int bins_used = 0;

  bool all_zero() const { return bins_used == 0; }
};

OrderFit order_report(const std::vector<BlockMatrix>& samples, double lambda_inner);

/// State after `step` normal-form steps, plus the generator computed from it.
struct NFStepRecord {
  int step = 0;
  OrderFit remainder_order;
  double max_hermiticity_defect = 0.0;  // of R over samples
  double max_unitarity_defect = 0.0;    // of the accumulated conjugator
  BlockFamily G;                        // generator used by the next step
  BlockFamily Z, R;                     // families if kept (final step always kept)
};

struct NFResult {
  PartitionPtr part;
  TimeGrid grid;
  NFParams params;
  NFOptions options;
  BlockMatrix laplacian;
  std::vector<NFStepRecord> records;  // records[s] = state after s steps
  int steps_done = 0;

  const BlockFamily& Z() const { return records.back().Z; }
  const BlockFamily& R() const { return records.back().R; }

  /// phi = conjugator(t) psi maps solutions of the original equation to
  /// solutions of the transformed one: e^{iG_{d-1}(t)} ... e^{iG_0(t)},
  /// built from interpolated generators and exact exponentials.
  BlockMatrix conjugator(double t, int depth = -1) const;
};

/// Iterates the per-sample step: decompose the remainder, solve the
/// homological equation on its nonresonant part, conjugate with the
/// quadrature correction for the time dependent generator, and accumulate the
/// resonant+average parts into Z. Step 0 uses the exact time derivative of
/// the generator inherited from the symbol family; later steps differentiate
/// the sampled generator on the grid.
NFResult run_normal_form(const SymbolSpec& v, const NFParams& p, const ModeSetPtr& modes,
                         const TimeGrid& grid, int n_steps, const NFOptions& opts = {});

}  // namespace torusnf
