#include "torusnf/blockops.hpp"

#include <algorithm>
#include <numeric>

namespace torusnf {

namespace {

struct UnionFind {
  std::vector<int> parent, rank_;
  explicit UnionFind(int n) : parent(n), rank_(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    int root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) {
      const int next = parent[x];
      parent[x] = root;
      x = next;
    }
    return root;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }
};

std::shared_ptr<const SupportPartition> finish(UnionFind& uf, const ModeSetPtr& modes) {
  const int n = modes->size();
  auto part = std::make_shared<SupportPartition>();
  part->modes = modes;
  part->group_of.assign(n, -1);
  part->local_of.assign(n, -1);
  std::vector<int> root_to_group(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = uf.find(i);
    if (root_to_group[r] < 0) {
      root_to_group[r] = static_cast<int>(part->groups.size());
      part->groups.emplace_back();
    }
    const int g = root_to_group[r];
    part->group_of[i] = g;
    part->local_of[i] = static_cast<int>(part->groups[g].size());
    part->groups[g].push_back(i);
  }
  return part;
}

}  // namespace

std::shared_ptr<const SupportPartition> SupportPartition::single_group(const ModeSetPtr& modes) {
  auto part = std::make_shared<SupportPartition>();
  const int n = modes->size();
  part->modes = modes;
  part->groups.resize(1);
  part->groups[0].resize(n);
  std::iota(part->groups[0].begin(), part->groups[0].end(), 0);
  part->group_of.assign(n, 0);
  part->local_of = part->groups[0];
  return part;
}

std::shared_ptr<const SupportPartition> SupportPartition::from_fibers(
    const ModeSetPtr& modes, const std::vector<VecI>& fibers) {
  UnionFind uf(modes->size());
  for (int i = 0; i < modes->size(); ++i) {
    for (const VecI& k : fibers) {
      if (k.isZero()) continue;
      const VecI other = modes->mode(i) + k;
      if (auto j = modes->index_of(other)) uf.unite(i, *j);
    }
  }
  return finish(uf, modes);
}

std::shared_ptr<const SupportPartition> SupportPartition::from_support(
    const std::vector<const MatC*>& mats, const ModeSetPtr& modes) {
  const int n = modes->size();
  UnionFind uf(n);
  for (const MatC* m : mats) {
    if (m->rows() != n || m->cols() != n) throw std::invalid_argument("dimension mismatch");
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        if (i != j && (*m)(i, j) != 0.0) uf.unite(i, j);
  }
  return finish(uf, modes);
}

BlockMatrix::BlockMatrix(PartitionPtr p) : part(std::move(p)) {
  blk.reserve(part->count());
  for (int g = 0; g < part->count(); ++g)
    blk.emplace_back(MatC::Zero(part->dim_of(g), part->dim_of(g)));
}

BlockMatrix BlockMatrix::diagonal(const PartitionPtr& p, const Vec& full_diag) {
  if (full_diag.size() != p->modes->size()) throw std::invalid_argument("dimension mismatch");
  BlockMatrix b(p);
  for (int g = 0; g < p->count(); ++g)
    for (int a = 0; a < p->dim_of(g); ++a)
      b.blk[g](a, a) = full_diag[p->groups[g][a]];
  return b;
}

BlockMatrix BlockMatrix::from_dense(const PartitionPtr& p, const OperatorMatrix& a) {
  if (a.size() != p->modes->size()) throw std::invalid_argument("dimension mismatch");
  BlockMatrix b(p);
  const MatC& m = a.entries();
  for (int j = 0; j < a.size(); ++j)
    for (int i = 0; i < a.size(); ++i) {
      const Complex v = m(i, j);
      if (v == 0.0) continue;
      if (p->group_of[i] != p->group_of[j])
        throw std::invalid_argument("matrix has an entry across partition groups");
      b.blk[p->group_of[i]](p->local_of[i], p->local_of[j]) = v;
    }
  return b;
}

OperatorMatrix BlockMatrix::to_dense() const {
  OperatorMatrix a(part->modes);
  for (int g = 0; g < count(); ++g) {
    const auto& idx = part->groups[g];
    for (std::size_t q = 0; q < idx.size(); ++q)
      for (std::size_t r = 0; r < idx.size(); ++r)
        a.entries()(idx[r], idx[q]) = blk[g](r, q);
  }
  return a;
}

BlockMatrix& BlockMatrix::operator+=(const BlockMatrix& o) {
  for (int g = 0; g < count(); ++g) blk[g] += o.blk[g];
  return *this;
}

BlockMatrix& BlockMatrix::operator-=(const BlockMatrix& o) {
  for (int g = 0; g < count(); ++g) blk[g] -= o.blk[g];
  return *this;
}

BlockMatrix& BlockMatrix::operator*=(double s) {
  for (auto& m : blk) m *= s;
  return *this;
}

double BlockMatrix::max_abs() const {
  double v = 0.0;
  for (const auto& m : blk)
    if (m.size()) v = std::max(v, m.cwiseAbs().maxCoeff());
  return v;
}

double BlockMatrix::frobenius() const {
  double s = 0.0;
  for (const auto& m : blk) s += m.squaredNorm();
  return std::sqrt(s);
}

double BlockMatrix::hermiticity_defect() const {
  double v = 0.0;
  for (const auto& m : blk)
    if (m.size()) v = std::max(v, (MatC(m - m.adjoint())).cwiseAbs().maxCoeff());
  return v;
}

double BlockMatrix::max_abs_inner(double lambda_inner) const {
  const ModeSet& ms = *part->modes;
  double v = 0.0;
  for (int g = 0; g < count(); ++g) {
    const auto& idx = part->groups[g];
    for (std::size_t q = 0; q < idx.size(); ++q)
      for (std::size_t r = 0; r < idx.size(); ++r) {
        const Complex e = blk[g](r, q);
        if (e == 0.0) continue;
        const Covector eta =
            Covector::from_doubled(ms.mode(idx[r]) + ms.mode(idx[q]));
        if (jap_bracket(eta, ms.metric()) <= lambda_inner) v = std::max(v, std::abs(e));
      }
  }
  return v;
}

namespace {

void require_hermitian(const MatC& g, double tol) {
  const double scale = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
  const double defect = g.size() ? (MatC(g - g.adjoint())).cwiseAbs().maxCoeff() : 0.0;
  if (defect > tol * std::max(1.0, scale))
    throw std::invalid_argument("non-hermitian generator");
}

}  // namespace

BlockMatrix conjugate(const BlockMatrix& a, const BlockMatrix& g, double tau) {
  BlockMatrix out(a.part);
  for (int grp = 0; grp < a.count(); ++grp) {
    if (g.blk[grp].size() == 0 || g.blk[grp].cwiseAbs().maxCoeff() == 0.0) {
      out.blk[grp] = a.blk[grp];  // zero generator: exactly the identity map
      continue;
    }
    require_hermitian(g.blk[grp], 1e-10);
    Eigen::SelfAdjointEigenSolver<MatC> es(g.blk[grp]);
    const MatC& w = es.eigenvectors();
    const Vec& ev = es.eigenvalues();
    VecC phase(ev.size());
    for (int i = 0; i < ev.size(); ++i)
      phase[i] = std::polar(1.0, tau * ev[i]);
    const MatC ap = w.adjoint() * a.blk[grp] * w;
    out.blk[grp] = w * (phase.asDiagonal() * ap * phase.conjugate().asDiagonal()) * w.adjoint();
  }
  return out;
}

BlockMatrix lie_transform_delta(const BlockMatrix& h, const BlockMatrix& g,
                                const BlockMatrix& dg, const Quadrature& quad) {
  BlockMatrix out(h.part);
  for (int grp = 0; grp < h.count(); ++grp) {
    if (g.blk[grp].size() == 0 || g.blk[grp].cwiseAbs().maxCoeff() == 0.0) {
      out.blk[grp] = -quad.weights.sum() * dg.blk[grp];
      continue;
    }
    require_hermitian(g.blk[grp], 1e-10);
    Eigen::SelfAdjointEigenSolver<MatC> es(g.blk[grp]);
    const MatC& w = es.eigenvectors();
    const Vec& ev = es.eigenvalues();
    const int n = static_cast<int>(ev.size());

    const MatC hp = w.adjoint() * h.blk[grp] * w;
    const MatC dp = w.adjoint() * dg.blk[grp] * w;

    MatC acc = MatC::Zero(n, n);
    // e^{i tau G} X e^{-i tau G} in the eigenbasis is an entrywise phase;
    // the phase-minus-one form leaves the commuting part of H untouched.
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        const double gap = ev[r] - ev[c];
        acc(r, c) = (std::polar(1.0, gap) - 1.0) * hp(r, c);
        Complex corr = 0.0;
        for (int q = 0; q < quad.nodes.size(); ++q)
          corr += quad.weights[q] * std::polar(1.0, quad.nodes[q] * gap);
        acc(r, c) -= corr * dp(r, c);
      }
    out.blk[grp] = w * acc * w.adjoint();
  }
  return out;
}

BlockMatrix exponential(const BlockMatrix& g, double tau) {
  BlockMatrix out(g.part);
  for (int grp = 0; grp < g.count(); ++grp) {
    if (g.blk[grp].size() == 0 || g.blk[grp].cwiseAbs().maxCoeff() == 0.0) {
      out.blk[grp] = MatC::Identity(g.blk[grp].rows(), g.blk[grp].cols());
      continue;
    }
    require_hermitian(g.blk[grp], 1e-10);
    Eigen::SelfAdjointEigenSolver<MatC> es(g.blk[grp]);
    const MatC& w = es.eigenvectors();
    const Vec& ev = es.eigenvalues();
    VecC phase(ev.size());
    for (int i = 0; i < ev.size(); ++i) phase[i] = std::polar(1.0, tau * ev[i]);
    out.blk[grp] = w * phase.asDiagonal() * w.adjoint();
  }
  return out;
}

BlockMatrix multiply(const BlockMatrix& a, const BlockMatrix& b) {
  BlockMatrix out(a.part);
  for (int g = 0; g < a.count(); ++g) out.blk[g] = a.blk[g] * b.blk[g];
  return out;
}

BlockMatrix adjoint(const BlockMatrix& a) {
  BlockMatrix out(a.part);
  for (int g = 0; g < a.count(); ++g) out.blk[g] = a.blk[g].adjoint();
  return out;
}

double unitarity_defect(const BlockMatrix& u) {
  double s = 0.0;
  for (const auto& m : u.blk)
    s += (MatC(m * m.adjoint()) - MatC::Identity(m.rows(), m.cols())).squaredNorm();
  return std::sqrt(s);
}

BlockFamily::BlockFamily(PartitionPtr p, const TimeGrid& g) : part(std::move(p)), grid(g) {
  at.assign(grid.samples, BlockMatrix(part));
}

BlockMatrix BlockFamily::eval(double t) const {
  const Vec w = grid.interpolation_weights(t);
  BlockMatrix out(part);
  for (int j = 0; j < grid.samples; ++j) {
    if (w[j] == 0.0) continue;
    for (int g = 0; g < out.count(); ++g) out.blk[g] += w[j] * at[j].blk[g];
  }
  return out;
}

MatC BlockFamily::eval_group(int grp, double t) const {
  const Vec w = grid.interpolation_weights(t);
  MatC out = MatC::Zero(part->dim_of(grp), part->dim_of(grp));
  for (int j = 0; j < grid.samples; ++j)
    if (w[j] != 0.0) out += w[j] * at[j].blk[grp];
  return out;
}

BlockFamily BlockFamily::derivative(const Mat& d) const {
  BlockFamily out(part, grid);
  for (int j = 0; j < grid.samples; ++j)
    for (int l = 0; l < grid.samples; ++l) {
      if (d(j, l) == 0.0) continue;
      for (int g = 0; g < out.part->count(); ++g)
        out.at[j].blk[g] += d(j, l) * at[l].blk[g];
    }
  return out;
}

BlockMatrix quantize_blocks(const SymbolSpec& spec, double t, const PartitionPtr& part) {
  const ModeSet& ms = *part->modes;
  BlockMatrix out(part);
  for (const auto& term : spec.terms) {
    const double pt = term.profile.value(t);
    for (const auto& [k, c] : term.coeffs) {
      if (c == 0.0) continue;
      for (int j = 0; j < ms.size(); ++j) {
        const auto i = ms.index_of(VecI(ms.mode(j) + k));
        if (!i) continue;
        if (part->group_of[*i] != part->group_of[j])
          throw std::invalid_argument("symbol fiber crosses partition groups");
        const Covector eta = Covector::midpoint(ms.mode(j), k);
        out.blk[part->group_of[j]](part->local_of[*i], part->local_of[j]) +=
            pt * c * std::pow(jap_bracket(eta, ms.metric()), term.order);
      }
    }
  }
  return out;
}

BlockMatrix laplacian_blocks(const PartitionPtr& part) {
  Vec d(part->modes->size());
  for (int i = 0; i < part->modes->size(); ++i) d[i] = part->modes->norm_sq(i);
  return BlockMatrix::diagonal(part, d);
}

double sobolev_opnorm(const BlockMatrix& a, double sigma1, double sigma2, double tol) {
  const ModeSet& ms = *a.part->modes;
  double best = 0.0;
  for (int g = 0; g < a.count(); ++g) {
    const auto& idx = a.part->groups[g];
    const int n = static_cast<int>(idx.size());
    MatC b = a.blk[g];
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        b(r, c) *= std::pow(ms.jap(idx[r]), sigma2) * std::pow(ms.jap(idx[c]), -sigma1);
    if (b.cwiseAbs().maxCoeff() == 0.0) continue;
    if (n <= 64) {
      Eigen::JacobiSVD<MatC> svd(b);
      best = std::max(best, svd.singularValues()[0]);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<MatC> es(MatC(b.adjoint() * b), Eigen::EigenvaluesOnly);
    best = std::max(best, std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff())));
  }
  (void)tol;
  return best;
}

}  // namespace torusnf
