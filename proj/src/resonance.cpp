#include "torusnf/resonance.hpp"

#include <cmath>

namespace torusnf {

std::vector<std::string> validate_params(const NFParams& p) {
  std::vector<std::string> errs;
  if (p.d < 1) errs.push_back("d < 1");
  if (!(p.epsilon * (p.tau + 1) > 0)) errs.push_back("epsilon (tau+1) <= 0");
  if (!(p.epsilon * (p.tau + 1) < p.delta)) errs.push_back("epsilon (tau+1) >= delta");
  if (!(p.delta < 1)) errs.push_back("delta >= 1");
  if (!(p.tau >= p.d - 1)) errs.push_back("tau < d-1");
  if (!(p.delta_star() < 1)) errs.push_back("delta + d (d+tau+1) epsilon >= 1");
  if (!(p.m < 2 * p.delta)) errs.push_back("m >= 2 delta");
  if (!(p.m < 2)) errs.push_back("m >= 2");
  return errs;
}

double chi(double y) {
  const double a = std::abs(y);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  auto f = [](double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; };
  const double up = f(2.0 * (1.0 - a));
  return up / (up + f(2.0 * (a - 0.5)));
}

double chi_k(const Covector& eta, const VecI& k, const NFParams& p, const MetricTensor& m) {
  if (k.isZero()) throw std::invalid_argument("chi_k requires k != 0");
  const double kn = std::sqrt(norm_sq(k, m));
  const double arg = 2.0 * std::pow(kn, p.tau) * inner(eta, Covector::integer(k), m) /
                     std::pow(jap_bracket(eta, m), p.delta);
  return chi(arg);
}

double tilde_chi_k(const Covector& eta, const VecI& k, const NFParams& p,
                   const MetricTensor& m) {
  if (k.isZero()) throw std::invalid_argument("tilde_chi_k requires k != 0");
  const double kn = std::sqrt(norm_sq(k, m));
  return chi(kn / std::pow(jap_bracket(eta, m), p.epsilon));
}

MaskWeights decomposition_weights(const Covector& eta, const VecI& k, const NFParams& p,
                                  const MetricTensor& m) {
  const double c = chi_k(eta, k, p, m);
  const double ct = tilde_chi_k(eta, k, p, m);
  return MaskWeights{c * ct, (1.0 - c) * ct, 1.0 - ct};
}

namespace {

// Shared entrywise splitting; iterates entries of a single dense matrix view
// whose rows/cols are global mode indices.
template <typename Get, typename Put>
void split_entries(const ModeSet& ms, int n_rows, int n_cols,
                   const std::vector<int>& rows, const std::vector<int>& cols,
                   const NFParams& p, Get&& get, Put&& put) {
  for (int q = 0; q < n_cols; ++q)
    for (int r = 0; r < n_rows; ++r) {
      const Complex v = get(r, q);
      if (v == 0.0) continue;
      const int gi = rows[r], gj = cols[q];
      const VecI k = ms.mode(gi) - ms.mode(gj);
      if (k.isZero()) {
        put(r, q, v, Complex(0), Complex(0), Complex(0));
        continue;
      }
      const Covector eta = Covector::from_doubled(ms.mode(gi) + ms.mode(gj));
      const MaskWeights w = decomposition_weights(eta, k, p, ms.metric());
      put(r, q, Complex(0), w.res * v, w.nr * v, w.smooth * v);
    }
}

bool entry_in_normal_form(const ModeSet& ms, int gi, int gj, const NFParams& p) {
  const VecI k = ms.mode(gi) - ms.mode(gj);
  if (k.isZero()) return true;
  const Covector eta = Covector::from_doubled(ms.mode(gi) + ms.mode(gj));
  return normal_form_support(eta, k, p, ms.metric());
}

}  // namespace

bool normal_form_support(const Covector& eta, const VecI& k, const NFParams& p,
                         const MetricTensor& m) {
  if (k.isZero()) throw std::invalid_argument("normal_form_support requires k != 0");
  const double kn = std::sqrt(norm_sq(k, m));
  const double jb = jap_bracket(eta, m);
  const double ip = std::abs(inner(eta, Covector::integer(k), m));
  return ip <= std::pow(jb, p.delta) * std::pow(kn, -p.tau) && kn <= std::pow(jb, p.epsilon);
}

Decomposition decompose(const OperatorMatrix& a, const NFParams& p) {
  const ModeSet& ms = a.modes();
  const int n = a.size();
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  Decomposition d{OperatorMatrix(a.modes_ptr()), OperatorMatrix(a.modes_ptr()),
                  OperatorMatrix(a.modes_ptr()), OperatorMatrix(a.modes_ptr())};
  split_entries(
      ms, n, n, all, all, p, [&](int r, int q) { return a(r, q); },
      [&](int r, int q, Complex avg, Complex res, Complex nr, Complex smooth) {
        d.avg.entries()(r, q) = avg;
        d.res.entries()(r, q) = res;
        d.nr.entries()(r, q) = nr;
        d.smooth.entries()(r, q) = smooth;
      });
  return d;
}

BlockDecomposition decompose(const BlockMatrix& a, const NFParams& p) {
  BlockDecomposition d{BlockMatrix(a.part), BlockMatrix(a.part), BlockMatrix(a.part),
                       BlockMatrix(a.part)};
  const ModeSet& ms = *a.part->modes;
  for (int g = 0; g < a.count(); ++g) {
    const auto& idx = a.part->groups[g];
    split_entries(
        ms, static_cast<int>(idx.size()), static_cast<int>(idx.size()), idx, idx, p,
        [&](int r, int q) { return a.blk[g](r, q); },
        [&](int r, int q, Complex avg, Complex res, Complex nr, Complex smooth) {
          d.avg.blk[g](r, q) = avg;
          d.res.blk[g](r, q) = res;
          d.nr.blk[g](r, q) = nr;
          d.smooth.blk[g](r, q) = smooth;
        });
  }
  return d;
}

bool is_normal_form(const OperatorMatrix& a, const NFParams& p) {
  const ModeSet& ms = a.modes();
  for (int j = 0; j < a.size(); ++j)
    for (int i = 0; i < a.size(); ++i)
      if (a(i, j) != 0.0 && !entry_in_normal_form(ms, i, j, p)) return false;
  return true;
}

bool is_normal_form(const BlockMatrix& a, const NFParams& p) {
  const ModeSet& ms = *a.part->modes;
  for (int g = 0; g < a.count(); ++g) {
    const auto& idx = a.part->groups[g];
    for (std::size_t q = 0; q < idx.size(); ++q)
      for (std::size_t r = 0; r < idx.size(); ++r)
        if (a.blk[g](r, q) != 0.0 && !entry_in_normal_form(ms, idx[r], idx[q], p))
          return false;
  }
  return true;
}

}  // namespace torusnf
