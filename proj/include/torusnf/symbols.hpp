#pragma once

#include <map>

#include "torusnf/geometry.hpp"

namespace torusnf {

enum class ProfileKind { constant, cosine, sine };

/// Scalar time dependence from the closed family {a, a cos(wt), a sin(wt)}:
/// differentiation stays inside the family, so d/dt is exact.
struct TimeProfile {
  ProfileKind kind = ProfileKind::constant;
  double omega = 0.0;
  double amp = 1.0;

  double value(double t) const {
    switch (kind) {
      case ProfileKind::constant: return amp;
      case ProfileKind::cosine: return amp * std::cos(omega * t);
      case ProfileKind::sine: return amp * std::sin(omega * t);
    }
    return 0.0;
  }

  TimeProfile derivative() const {
    switch (kind) {
      case ProfileKind::constant: return {ProfileKind::constant, 0.0, 0.0};
      case ProfileKind::cosine: return {ProfileKind::sine, omega, -amp * omega};
      case ProfileKind::sine: return {ProfileKind::cosine, omega, amp * omega};
    }
    return {};
  }

  static TimeProfile constant(double a) { return {ProfileKind::constant, 0.0, a}; }
  static TimeProfile cosine(double a, double w) { return {ProfileKind::cosine, w, a}; }
  static TimeProfile sine(double a, double w) { return {ProfileKind::sine, w, a}; }
};

/// One product term profile(t) * (sum_k c_k e^{ik.x}) * <xi>^order.
struct SymbolTerm {
  TimeProfile profile;
  double order = 0.0;
  std::vector<std::pair<VecI, Complex>> coeffs;
};

/// Finite sum of terms; a time dependent symbol v(t,x,xi) of order
/// max over terms.
struct SymbolSpec {
  std::vector<SymbolTerm> terms;

  double declared_order() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) m = std::max(m, t.order);
    return terms.empty() ? 0.0 : m;
  }

  std::vector<VecI> fourier_support() const;  // union over terms, deduplicated
};

/// v_hat_k(t, xi) = sum over terms with k in support of profile(t) c_k <xi>^order.
Complex evaluate_coefficient(const SymbolSpec& spec, double t, const VecI& k,
                             const Vec& xi, const MetricTensor& m);

/// True iff every term satisfies conj(c_{-k}) = c_k; the radial xi-profiles
/// are real, so this is pointwise reality of the symbol term by term.
bool is_real_valued(const SymbolSpec& spec);

/// Exact d/dt within the trig family. Constant terms vanish from the result.
SymbolSpec time_derivative(const SymbolSpec& spec);

struct SeminormOptions {
  int x_points_per_dim = 64;
  std::vector<double> t_samples = {0.0};
  double xi_step = 0.5;  // central-difference step for xi derivatives
};

/// Numerical estimate of sup |dx^N1 dxi^N2 v| / <xi>^{order - delta N2} over
/// the sampled grid. x-derivatives are exact (coefficients scaled by (i k_A)^N1,
/// maximized over axes A); xi-derivatives use central differences along an
/// axis, also maximized over axes. A sampled sup is a lower bound on the true
/// seminorm; we only use it for comparative order tracking.
double estimate_seminorm(const SymbolSpec& spec, int n1, int n2, double delta,
                         const MetricTensor& m, const std::vector<Vec>& xi_samples,
                         const SeminormOptions& opts = {});

}  // namespace torusnf
