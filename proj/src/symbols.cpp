#include "torusnf/symbols.hpp"

#include <algorithm>
#include <cmath>

namespace torusnf {

std::vector<VecI> SymbolSpec::fourier_support() const {
  std::vector<VecI> ks;
  for (const auto& term : terms)
    for (const auto& [k, c] : term.coeffs) {
      if (std::abs(c) == 0.0) continue;
      bool seen = false;
      for (const auto& q : ks)
        if (q == k) { seen = true; break; }
      if (!seen) ks.push_back(k);
    }
  return ks;
}

Complex evaluate_coefficient(const SymbolSpec& spec, double t, const VecI& k,
                             const Vec& xi, const MetricTensor& m) {
  Complex v = 0.0;
  const double jb = jap_bracket(xi, m);
  for (const auto& term : spec.terms) {
    Complex ck = 0.0;
    bool found = false;
    for (const auto& [kk, c] : term.coeffs)
      if (kk == k) { ck += c; found = true; }
    if (!found) continue;
    v += term.profile.value(t) * ck * std::pow(jb, term.order);
  }
  return v;
}

bool is_real_valued(const SymbolSpec& spec) {
  for (const auto& term : spec.terms) {
    for (const auto& [k, c] : term.coeffs) {
      Complex cneg = 0.0;
      const VecI mk = -k;
      for (const auto& [kk, cc] : term.coeffs)
        if (kk == mk) cneg += cc;
      Complex ctot = 0.0;
      for (const auto& [kk, cc] : term.coeffs)
        if (kk == k) ctot += cc;
      if (std::conj(cneg) != ctot) return false;
    }
  }
  return true;
}

SymbolSpec time_derivative(const SymbolSpec& spec) {
  SymbolSpec d;
  for (const auto& term : spec.terms) {
    if (term.profile.kind == ProfileKind::constant) continue;
    SymbolTerm dt = term;
    dt.profile = term.profile.derivative();
    d.terms.push_back(std::move(dt));
  }
  return d;
}

namespace {

// Value of one term's x-part with N1 exact x_A-derivatives applied.
Complex x_part(const SymbolTerm& term, int n1, int axis, const Vec& x) {
  Complex s = 0.0;
  for (const auto& [k, c] : term.coeffs) {
    double phase = 0.0;
    for (int a = 0; a < x.size(); ++a) phase += k[a] * x[a];
    Complex factor = c;
    if (n1 > 0) {
      const Complex ik(0.0, static_cast<double>(k[axis]));
      factor *= std::pow(ik, n1);
    }
    s += factor * Complex(std::cos(phase), std::sin(phase));
  }
  return s;
}

Complex value_n1(const SymbolSpec& spec, double t, int n1, int axis, const Vec& x,
                 const Vec& xi, const MetricTensor& m) {
  Complex v = 0.0;
  const double jb = jap_bracket(xi, m);
  for (const auto& term : spec.terms)
    v += term.profile.value(t) * x_part(term, n1, axis, x) * std::pow(jb, term.order);
  return v;
}

}  // namespace

double estimate_seminorm(const SymbolSpec& spec, int n1, int n2, double delta,
                         const MetricTensor& m, const std::vector<Vec>& xi_samples,
                         const SeminormOptions& opts) {
  if (xi_samples.empty()) throw std::invalid_argument("empty grid");
  if (n2 < 0 || n2 > 4) throw std::invalid_argument("xi derivative order must be in [0,4]");
  const int d = m.dim();
  const double h = opts.xi_step;

  // x sampling grid (periodic); the x-part has finite Fourier support so a
  // moderately fine grid captures the sup well.
  std::vector<Vec> xs;
  {
    const int nx = std::max(1, opts.x_points_per_dim);
    std::vector<int> idx(d, 0);
    Vec x(d);
    while (true) {
      for (int a = 0; a < d; ++a) x[a] = 2.0 * M_PI * idx[a] / nx;
      xs.push_back(x);
      int a = d - 1;
      while (a >= 0 && idx[a] == nx - 1) { idx[a] = 0; --a; }
      if (a < 0) break;
      ++idx[a];
    }
  }

  // Central-difference weights for d^n2/dxi^n2 with step h (binomial stencil).
  std::vector<std::pair<double, double>> stencil;  // (offset in units of h, weight)
  {
    const double hn = std::pow(h, n2);
    for (int j = 0; j <= n2; ++j) {
      double binom = 1.0;
      for (int i = 0; i < j; ++i) binom = binom * (n2 - i) / (i + 1);
      const double w = ((j % 2) ? -1.0 : 1.0) * binom / hn;
      stencil.emplace_back(n2 / 2.0 - j, w);
    }
  }

  double sup = 0.0;
  for (const Vec& xi : xi_samples) {
    const double weight = std::pow(jap_bracket(xi, m), spec.declared_order() - delta * n2);
    for (double t : opts.t_samples) {
      for (int ax1 = 0; ax1 < (n1 > 0 ? d : 1); ++ax1) {
        for (int ax2 = 0; ax2 < (n2 > 0 ? d : 1); ++ax2) {
          for (const Vec& x : xs) {
            Complex v = 0.0;
            if (n2 == 0) {
              v = value_n1(spec, t, n1, ax1, x, xi, m);
            } else {
              for (const auto& [off, w] : stencil) {
                Vec xs2 = xi;
                xs2[ax2] += off * h;
                v += w * value_n1(spec, t, n1, ax1, x, xs2, m);
              }
            }
            sup = std::max(sup, std::abs(v) / weight);
          }
        }
      }
    }
  }
  return sup;
}

}  // namespace torusnf
