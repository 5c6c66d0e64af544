#include "torusnf/geometry.hpp"

#include <cmath>

namespace torusnf {

MetricTensor metric_from_basis(const LatticeBasis& basis) {
  const Mat& B = basis.vectors;
  if (B.rows() != B.cols() || B.rows() == 0)
    throw std::invalid_argument("degenerate lattice: basis must be square and nonempty");
  const Mat g = B.transpose() * B;
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible())
    throw std::invalid_argument("degenerate lattice: basis vectors are dependent");
  return MetricTensor(g, lu.inverse());
}

static void check_dims(int a, int b, int dm) {
  if (a != b || a != dm) throw std::invalid_argument("dimension mismatch");
}

double inner(const Vec& xi, const Vec& eta, const MetricTensor& m) {
  check_dims(static_cast<int>(xi.size()), static_cast<int>(eta.size()), m.dim());
  return xi.dot(m.g_inv() * eta);
}

double inner(const VecI& xi, const VecI& eta, const MetricTensor& m) {
  return inner(Vec(xi.cast<double>()), Vec(eta.cast<double>()), m);
}

double inner(const Covector& xi, const Covector& eta, const MetricTensor& m) {
  check_dims(xi.dim(), eta.dim(), m.dim());
  const Vec a = xi.doubled().cast<double>();
  const Vec b = eta.doubled().cast<double>();
  return 0.25 * a.dot(m.g_inv() * b);
}

double jap_bracket(const Vec& xi, const MetricTensor& m) {
  return std::sqrt(1.0 + inner(xi, xi, m));
}

double jap_bracket(const VecI& xi, const MetricTensor& m) {
  return std::sqrt(1.0 + inner(xi, xi, m));
}

double jap_bracket(const Covector& xi, const MetricTensor& m) {
  return std::sqrt(1.0 + inner(xi, xi, m));
}

}  // namespace torusnf
