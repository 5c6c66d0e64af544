#include "torusnf/weyl.hpp"

#include <cstring>
#include <fstream>

#include "torusnf/blockops.hpp"

namespace torusnf {

OperatorMatrix quantize(const SymbolSpec& spec, double t, const ModeSetPtr& modes) {
  const ModeSet& ms = *modes;
  OperatorMatrix out(modes);
  for (const auto& term : spec.terms) {
    const double pt = term.profile.value(t);
    for (const auto& [k, c] : term.coeffs) {
      if (c == 0.0) continue;
      for (int j = 0; j < ms.size(); ++j) {
        const auto i = ms.index_of(VecI(ms.mode(j) + k));
        if (!i) continue;
        const Covector eta = Covector::midpoint(ms.mode(j), k);
        out.entries()(*i, j) +=
            pt * c * std::pow(jap_bracket(eta, ms.metric()), term.order);
      }
    }
  }
  return out;
}

OperatorMatrix laplacian_matrix(const ModeSetPtr& modes) {
  OperatorMatrix out(modes);
  for (int i = 0; i < modes->size(); ++i) out.entries()(i, i) = modes->norm_sq(i);
  return out;
}

std::vector<std::pair<Covector, Complex>> dequantize(const OperatorMatrix& a, const VecI& k) {
  const ModeSet& ms = a.modes();
  std::vector<std::pair<Covector, Complex>> fiber;
  for (int j = 0; j < ms.size(); ++j) {
    const auto i = ms.index_of(VecI(ms.mode(j) + k));
    if (!i) continue;
    fiber.emplace_back(Covector::midpoint(ms.mode(j), k), a(*i, j));
  }
  return fiber;
}

OperatorMatrix conjugate_exact(const OperatorMatrix& a, const OperatorMatrix& g, double tau) {
  if (g.size() && g.hermiticity_defect() > 1e-10 * std::max(1.0, g.max_abs()))
    throw std::invalid_argument("non-hermitian generator");
  auto part = SupportPartition::from_support({&a.entries(), &g.entries()}, a.modes_ptr());
  const BlockMatrix ab = BlockMatrix::from_dense(part, a);
  const BlockMatrix gb = BlockMatrix::from_dense(part, g);
  return conjugate(ab, gb, tau).to_dense();
}

OperatorMatrix lie_series(const OperatorMatrix& a, const OperatorMatrix& g, double tau, int n) {
  auto part = SupportPartition::from_support({&a.entries(), &g.entries()}, a.modes_ptr());
  BlockMatrix term = BlockMatrix::from_dense(part, a);
  const BlockMatrix gb = BlockMatrix::from_dense(part, g);
  BlockMatrix sum = term;
  const Complex itau(0.0, tau);
  Complex factor = 1.0;
  for (int j = 1; j <= n; ++j) {
    // term <- [G, term]
    BlockMatrix next(part);
    for (int grp = 0; grp < term.count(); ++grp)
      next.blk[grp] = gb.blk[grp] * term.blk[grp] - term.blk[grp] * gb.blk[grp];
    term = std::move(next);
    factor *= itau / static_cast<double>(j);
    for (int grp = 0; grp < sum.count(); ++grp) sum.blk[grp] += factor * term.blk[grp];
  }
  return sum.to_dense();
}

double sobolev_opnorm(const OperatorMatrix& a, double sigma1, double sigma2,
                      double tol, int max_iter) {
  const ModeSet& ms = a.modes();
  const int n = a.size();
  if (n == 0) return 0.0;
  Vec w_out(n), w_in(n);
  for (int i = 0; i < n; ++i) {
    w_out[i] = std::pow(ms.jap(i), sigma2);
    w_in[i] = std::pow(ms.jap(i), -sigma1);
  }
  const MatC& m = a.entries();
  auto apply = [&](const VecC& x) -> VecC {
    return w_out.asDiagonal() * (m * (w_in.asDiagonal() * x).eval()).eval();
  };
  auto apply_adj = [&](const VecC& x) -> VecC {
    return w_in.asDiagonal() * (m.adjoint() * (w_out.asDiagonal() * x).eval()).eval();
  };

  CounterRng rng(0x5eedu ^ static_cast<std::uint64_t>(n));
  VecC v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.cnormal();
  v.normalize();

  double sigma = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    VecC z = apply(v);
    const double zn = z.norm();
    if (zn == 0.0) return 0.0;
    VecC w = apply_adj(z);
    const double wn = w.norm();
    if (wn == 0.0) return zn;
    const double next = std::sqrt(wn);
    v = w / wn;
    if (it > 2 && std::abs(next - sigma) <= tol * std::max(1.0, next)) return next;
    sigma = next;
  }
  return sigma;
}

namespace {
constexpr std::uint32_t kMatrixMagic = 0x544e464d;  // "TNFM"
constexpr std::uint32_t kMatrixVersion = 1;

template <typename T>
void put(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
bool get(std::ifstream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return bool(is);
}
}  // namespace

void save_matrix(const std::filesystem::path& path, const OperatorMatrix& a) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  put(os, kMatrixMagic);
  put(os, kMatrixVersion);
  const ModeSet& ms = a.modes();
  put(os, static_cast<std::int32_t>(ms.dim()));
  put(os, static_cast<std::int32_t>(ms.size()));
  for (int i = 0; i < ms.size(); ++i)
    for (int d = 0; d < ms.dim(); ++d) put(os, static_cast<std::int32_t>(ms.mode(i)[d]));
  os.write(reinterpret_cast<const char*>(a.entries().data()),
           static_cast<std::streamsize>(sizeof(Complex)) * a.entries().size());
}

std::optional<OperatorMatrix> load_matrix(const std::filesystem::path& path,
                                          const ModeSetPtr& modes) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  std::uint32_t magic = 0, version = 0;
  std::int32_t dim = 0, n = 0;
  if (!get(is, magic) || magic != kMatrixMagic) return std::nullopt;
  if (!get(is, version) || version != kMatrixVersion) return std::nullopt;
  if (!get(is, dim) || !get(is, n)) return std::nullopt;
  if (dim != modes->dim() || n != modes->size()) return std::nullopt;
  for (int i = 0; i < n; ++i)
    for (int d = 0; d < dim; ++d) {
      std::int32_t c = 0;
      if (!get(is, c)) return std::nullopt;
      if (c != modes->mode(i)[d]) return std::nullopt;
    }
  MatC m(n, n);
  is.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(Complex)) * m.size());
  if (!is) return std::nullopt;
  return OperatorMatrix(modes, std::move(m));
}

}  // namespace torusnf
