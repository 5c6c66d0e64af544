#include "torusnf/modes.hpp"

#include <algorithm>
#include <cmath>

namespace torusnf {

static std::vector<int> key_of(const VecI& xi) {
  return std::vector<int>(xi.data(), xi.data() + xi.size());
}

std::shared_ptr<const ModeSet> ModeSet::build(double lambda, const MetricTensor& m) {
  if (lambda < 1.0) throw std::invalid_argument("mode cutoff must satisfy lambda >= 1");
  const int d = m.dim();
  const double c = lambda * lambda - 1.0;  // |xi|^2 <= c

  // Bounding box of the ellipsoid xi^T g^AB xi <= c: |xi_A| <= sqrt(c g_AA).
  std::vector<int> hi(d);
  for (int a = 0; a < d; ++a)
    hi[a] = static_cast<int>(std::floor(std::sqrt(std::max(0.0, c * m.g()(a, a))) + 1e-9));

  auto ms = std::shared_ptr<ModeSet>(new ModeSet());
  ms->lambda_ = lambda;
  ms->metric_ = m;

  VecI xi(d);
  std::vector<int> idx(d, 0);
  for (int a = 0; a < d; ++a) idx[a] = -hi[a];
  while (true) {
    for (int a = 0; a < d; ++a) xi[a] = idx[a];
    if (torusnf::norm_sq(xi, m) <= c) ms->modes_.push_back(xi);
    int a = d - 1;
    while (a >= 0 && idx[a] == hi[a]) {
      idx[a] = -hi[a];
      --a;
    }
    if (a < 0) break;
    ++idx[a];
  }

  std::sort(ms->modes_.begin(), ms->modes_.end(), [](const VecI& x, const VecI& y) {
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(),
                                        y.data() + y.size());
  });

  ms->jap_.resize(ms->modes_.size());
  ms->norm_sq_.resize(ms->modes_.size());
  for (std::size_t i = 0; i < ms->modes_.size(); ++i) {
    ms->norm_sq_[i] = torusnf::norm_sq(ms->modes_[i], m);
    ms->jap_[i] = std::sqrt(1.0 + ms->norm_sq_[i]);
    ms->index_.emplace(key_of(ms->modes_[i]), static_cast<int>(i));
  }
  return ms;
}

std::optional<int> ModeSet::index_of(const VecI& xi) const {
  auto it = index_.find(key_of(xi));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace torusnf
