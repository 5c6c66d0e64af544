#pragma once

#include <memory>
#include <optional>
#include <unordered_map>

#include "torusnf/geometry.hpp"

namespace torusnf {

/// Truncated Fourier mode set {xi in Z^d : <xi> <= Lambda}, ordered
/// lexicographically. Carries the metric it was built with, since every
/// bracket involving its modes uses that metric.
class ModeSet {
 public:
  static std::shared_ptr<const ModeSet> build(double lambda, const MetricTensor& m);

  int size() const { return static_cast<int>(modes_.size()); }
  int dim() const { return metric_.dim(); }
  double lambda() const { return lambda_; }
  double lambda_inner(double buffer = 0.25) const { return lambda_ * (1.0 - buffer); }
  const MetricTensor& metric() const { return metric_; }

  const VecI& mode(int i) const { return modes_[i]; }
  double jap(int i) const { return jap_[i]; }        // <xi_i>
  double norm_sq(int i) const { return norm_sq_[i]; }  // |xi_i|^2

  std::optional<int> index_of(const VecI& xi) const;
  bool contains(const VecI& xi) const { return index_of(xi).has_value(); }

 private:
  ModeSet() = default;

  struct KeyHash {
    std::size_t operator()(const std::vector<int>& v) const {
      return fnv1a64(v.data(), v.size() * sizeof(int));
    }
  };

  double lambda_ = 0;
  MetricTensor metric_;
  std::vector<VecI> modes_;
  std::vector<double> jap_;
  std::vector<double> norm_sq_;
  std::unordered_map<std::vector<int>, int, KeyHash> index_;
};

using ModeSetPtr = std::shared_ptr<const ModeSet>;

}  // namespace torusnf
