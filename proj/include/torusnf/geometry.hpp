#pragma once

#include "torusnf/common.hpp"

namespace torusnf {

/// Basis vectors of the periodicity lattice, one per column.
struct LatticeBasis {
  Mat vectors;

  int dim() const { return static_cast<int>(vectors.cols()); }

  static LatticeBasis identity(int d) {
    return LatticeBasis{Mat::Identity(d, d)};
  }
};

/// Constant flat metric g_AB = e_A . e_B together with its inverse g^AB.
/// Every inner product, norm and bracket downstream uses g^AB; the Euclidean
/// dot product appears only here, when the metric is built from a basis.
class MetricTensor {
 public:
  MetricTensor() = default;
  MetricTensor(Mat g, Mat g_inv) : g_(std::move(g)), g_inv_(std::move(g_inv)) {}

  static MetricTensor identity(int d) {
    return MetricTensor(Mat::Identity(d, d), Mat::Identity(d, d));
  }

  int dim() const { return static_cast<int>(g_.rows()); }
  const Mat& g() const { return g_; }
  const Mat& g_inv() const { return g_inv_; }

 private:
  Mat g_, g_inv_;
};

/// Point of the half-integer lattice (Z/2)^d, stored as doubled integers so
/// arithmetic stays exact; conversion to floating point happens only inside
/// inner products and brackets.
class Covector {
 public:
  Covector() = default;

  static Covector integer(const VecI& k) { return Covector(2 * k); }
  /// xi + k/2, the Weyl midpoint of the fiber (k, xi).
  static Covector midpoint(const VecI& xi, const VecI& k) {
    return Covector(2 * xi + k);
  }
  static Covector from_doubled(VecI twice) { return Covector(std::move(twice)); }

  int dim() const { return static_cast<int>(twice_.size()); }
  const VecI& doubled() const { return twice_; }
  Vec components() const { return twice_.cast<double>() / 2.0; }

  bool is_integer() const {
    for (int i = 0; i < twice_.size(); ++i)
      if (twice_[i] % 2 != 0) return false;
    return true;
  }
  VecI integer_components() const { return twice_ / 2; }

  bool operator==(const Covector& o) const { return twice_ == o.twice_; }

 private:
  explicit Covector(VecI twice) : twice_(std::move(twice)) {}
  VecI twice_;
};

/// g_AB := e_A . e_B and its inverse. Throws on a rank-deficient basis.
MetricTensor metric_from_basis(const LatticeBasis& basis);

/// <xi|eta> = sum_AB g^AB xi_A eta_B, for real covector components.
double inner(const Vec& xi, const Vec& eta, const MetricTensor& m);
double inner(const VecI& xi, const VecI& eta, const MetricTensor& m);
double inner(const Covector& xi, const Covector& eta, const MetricTensor& m);

inline double norm_sq(const Vec& xi, const MetricTensor& m) { return inner(xi, xi, m); }
inline double norm_sq(const VecI& xi, const MetricTensor& m) { return inner(xi, xi, m); }
inline double norm_sq(const Covector& xi, const MetricTensor& m) { return inner(xi, xi, m); }

/// Japanese bracket <xi> = (1 + |xi|^2)^{1/2}; always >= 1.
double jap_bracket(const Vec& xi, const MetricTensor& m);
double jap_bracket(const VecI& xi, const MetricTensor& m);
double jap_bracket(const Covector& xi, const MetricTensor& m);

}  // namespace torusnf
