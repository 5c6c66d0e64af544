#pragma once

#include "torusnf/common.hpp"

namespace torusnf {

/// Exact integer lattice algebra (arbitrary precision, since Hermite pivots
/// can grow past machine range on adversarial inputs).

/// Canonical row Hermite normal form of the lattice generated by `rows`:
/// echelon rows with positive pivots and entries above each pivot reduced
/// into [0, pivot). Zero rows are dropped; the result is unique per lattice.
std::vector<VecI> row_hnf(const std::vector<VecI>& rows, int d);

/// Basis rows of {x in Z^d : A x = 0}; always a saturated lattice.
std::vector<VecI> integer_kernel(const std::vector<VecI>& a_rows, int d);

/// Canonical basis of span_R(rows) intersected with Z^d (the saturation),
/// via the double integer kernel.
std::vector<VecI> saturate_lattice(const std::vector<VecI>& rows, int d);

}  // namespace torusnf
