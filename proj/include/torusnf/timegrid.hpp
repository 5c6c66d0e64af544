#pragma once

#include "torusnf/common.hpp"

namespace torusnf {

enum class DerivScheme { automatic, fd4, spectral };

/// Uniform sampling of [t0, t1]. A periodic grid treats t1 - t0 as one exact
/// period: samples exclude the right endpoint, off-grid evaluation uses
/// trigonometric cardinal interpolation, and time derivatives are spectral
/// (exact for the stored interpolant). An aperiodic grid includes both
/// endpoints, interpolates with local 6-point Lagrange stencils and
/// differentiates with 4th-order finite differences (one-sided at the ends).
struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  int samples = 0;
  bool periodic = false;

  void validate() const {
    if (samples < 5) throw std::invalid_argument("time grid needs at least 5 samples");
    if (!(t1 > t0)) throw std::invalid_argument("time grid needs t1 > t0");
  }

  double period() const { return t1 - t0; }
  double dt() const { return periodic ? period() / samples : period() / (samples - 1); }
  double time(int j) const { return t0 + j * dt(); }

  /// Weights w_j with f(t) ~= sum_j w_j f(t_j).
  Vec interpolation_weights(double t) const;

  /// M x M matrix D with (Df)_j ~= f'(t_j).
  Mat derivative_matrix(DerivScheme scheme = DerivScheme::automatic) const;
};

/// Nodes and weights on [0, 1].
struct Quadrature {
  Vec nodes;
  Vec weights;

  static Quadrature gauss_legendre01(int n);
};

}  // namespace torusnf
