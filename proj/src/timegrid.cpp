#include "torusnf/timegrid.hpp"

#include <cmath>

namespace torusnf {

namespace {

// Trig cardinal function for an even number of equispaced samples:
// D(0) = 1, D(theta_k) = 0 at the other nodes, exact on trig polynomials
// of degree < M/2 (Nyquist handled as a cosine).
double trig_cardinal(double theta, int m) {
  const double s = std::sin(0.5 * theta);
  if (std::abs(s) < 1e-13) return 1.0;  // theta ~ multiple of 2*pi
  if (m % 2 == 0) return std::sin(0.5 * m * theta) / (m * std::tan(0.5 * theta));
  return std::sin(0.5 * m * theta) / (m * s);
}

}  // namespace

Vec TimeGrid::interpolation_weights(double t) const {
  validate();
  Vec w = Vec::Zero(samples);
  if (periodic) {
    const double omega = 2.0 * M_PI / period();
    for (int j = 0; j < samples; ++j) {
      double theta = omega * (t - time(j));
      w[j] = trig_cardinal(theta, samples);
    }
    return w;
  }

  // Local Lagrange interpolation on a 6-point stencil around t.
  const double h = dt();
  const int width = std::min(6, samples);
  double pos = (t - t0) / h;
  int first = static_cast<int>(std::floor(pos)) - width / 2 + 1;
  first = std::max(0, std::min(first, samples - width));
  for (int a = 0; a < width; ++a) {
    const int j = first + a;
    double num = 1.0, den = 1.0;
    for (int b = 0; b < width; ++b) {
      if (a == b) continue;
      const int l = first + b;
      num *= (t - time(l));
      den *= (time(j) - time(l));
    }
    w[j] = num / den;
  }
  return w;
}

Mat TimeGrid::derivative_matrix(DerivScheme scheme) const {
  validate();
  if (scheme == DerivScheme::automatic)
    scheme = periodic ? DerivScheme::spectral : DerivScheme::fd4;
  if (scheme == DerivScheme::spectral && !periodic)
    throw std::invalid_argument("spectral time derivative requires a periodic grid");

  const int m = samples;
  Mat d = Mat::Zero(m, m);

  if (scheme == DerivScheme::spectral) {
    // Antisymmetric circulant differentiation matrix for even sample counts;
    // exact on the interpolant, Nyquist mode mapped to zero.
    const double scale = 2.0 * M_PI / period();
    for (int j = 0; j < m; ++j)
      for (int l = 0; l < m; ++l) {
        if (j == l) continue;
        const int k = j - l;
        const double sign = (k % 2) ? -1.0 : 1.0;
        const double v = (m % 2 == 0) ? 0.5 * sign / std::tan(M_PI * k / m)
                                      : 0.5 * sign / std::sin(M_PI * k / m);
        d(j, l) = scale * v;
      }
    return d;
  }

  // 4th-order finite differences.
  const double h = dt();
  auto row_central = [&](int j) {
    d(j, j - 2) = 1.0 / (12 * h);
    d(j, j - 1) = -8.0 / (12 * h);
    d(j, j + 1) = 8.0 / (12 * h);
    d(j, j + 2) = -1.0 / (12 * h);
  };
  if (periodic) {
    for (int j = 0; j < m; ++j) {
      auto at = [&](int l) -> double& { return d(j, ((l % m) + m) % m); };
      at(j - 2) += 1.0 / (12 * h);
      at(j - 1) += -8.0 / (12 * h);
      at(j + 1) += 8.0 / (12 * h);
      at(j + 2) += -1.0 / (12 * h);
    }
    return d;
  }
  for (int j = 2; j < m - 2; ++j) row_central(j);
  // One-sided 4th-order stencils at the edges.
  const double c0[5] = {-25, 48, -36, 16, -3};
  const double c1[5] = {-3, -10, 18, -6, 1};
  for (int a = 0; a < 5; ++a) {
    d(0, a) = c0[a] / (12 * h);
    d(1, a) = c1[a] / (12 * h);
    d(m - 1, m - 1 - a) = -c0[a] / (12 * h);
    d(m - 2, m - 1 - a) = -c1[a] / (12 * h);
  }
  return d;
}

Quadrature Quadrature::gauss_legendre01(int n) {
  if (n < 1) throw std::invalid_argument("quadrature needs at least one node");
  Quadrature q;
  q.nodes = Vec(n);
  q.weights = Vec(n);
  for (int i = 0; i < n; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[n - 1 - i] = 0.5 * (x + 1.0);
    q.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

}  // namespace torusnf
