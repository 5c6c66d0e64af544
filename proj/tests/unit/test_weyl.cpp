#include <doctest.h>

#include <filesystem>

#include "torusnf/blockops.hpp"

using namespace torusnf;

namespace {

VecI v2(int a, int b) {
  VecI v(2);
  v << a, b;
  return v;
}

SymbolSpec two_cos_x1(double order = 0.0, TimeProfile p = TimeProfile::constant(1.0)) {
  SymbolSpec s;
  SymbolTerm t;
  t.profile = p;
  t.order = order;
  t.coeffs = {{v2(1, 0), 1.0}, {v2(-1, 0), 1.0}};
  s.terms = {t};
  return s;
}

ModeSetPtr modes8() {
  static ModeSetPtr m = ModeSet::build(8.0, MetricTensor::identity(2));
  return m;
}

// Random Hermitian quantized operator with a handful of fibers.
OperatorMatrix random_hermitian(const ModeSetPtr& modes, std::uint64_t seed,
                                int n_fibers = 3) {
  CounterRng rng(seed);
  SymbolSpec spec;
  SymbolTerm t;
  t.order = rng.uniform();
  for (int i = 0; i < n_fibers; ++i) {
    VecI k(2);
    k << static_cast<int>(rng.next_u64() % 5) - 2, static_cast<int>(rng.next_u64() % 5) - 2;
    if (k.isZero()) k << 1, 0;
    const Complex c = rng.cnormal();
    t.coeffs.emplace_back(k, c);
    t.coeffs.emplace_back(VecI(-k), std::conj(c));
  }
  spec.terms = {t};
  return quantize(spec, 0.0, modes);
}

}  // namespace

TEST_CASE("quantize places fiber coefficients on shifted diagonals") {
  auto modes = modes8();
  const OperatorMatrix a = quantize(two_cos_x1(), 0.0, modes);
  int checked = 0;
  for (int j = 0; j < modes->size(); ++j) {
    const auto i = modes->index_of(VecI(modes->mode(j) + v2(1, 0)));
    if (!i) continue;
    CHECK(a(*i, j) == Complex(1.0));
    CHECK(a(j, *i) == Complex(1.0));
    ++checked;
  }
  CHECK(checked > 50);
  CHECK(a.hermiticity_defect() == 0.0);
}

TEST_CASE("quantize of a multiplier is diagonal with bracket weights") {
  auto modes = modes8();
  SymbolSpec s;
  SymbolTerm t;
  t.order = 1.0;
  t.coeffs = {{v2(0, 0), 1.0}};
  s.terms = {t};
  const OperatorMatrix a = quantize(s, 0.0, modes);
  for (int i = 0; i < modes->size(); ++i)
    CHECK(a(i, i).real() == doctest::Approx(modes->jap(i)).epsilon(1e-14));
}

TEST_CASE("quantize evaluates the radial profile at the Weyl midpoint") {
  auto modes = modes8();
  SymbolSpec s;
  SymbolTerm t;
  t.order = 1.0;
  t.coeffs = {{v2(1, 0), 0.5}, {v2(-1, 0), 0.5}};  // cos(x1) <xi>^1
  s.terms = {t};
  const OperatorMatrix a = quantize(s, 0.0, modes);
  const int row = *modes->index_of(v2(1, 0));
  const int col = *modes->index_of(v2(0, 0));
  CHECK(a(row, col).real() == doctest::Approx(std::sqrt(1.25) / 2).epsilon(1e-14));
}

TEST_CASE("quantize is linear in the spec") {
  auto modes = modes8();
  const SymbolSpec s1 = two_cos_x1(0.7);
  SymbolSpec s2;
  SymbolTerm t;
  t.order = 0.2;
  t.coeffs = {{v2(0, 1), Complex(0.3, 0.1)}, {v2(0, -1), Complex(0.3, -0.1)}};
  s2.terms = {t};
  SymbolSpec sum;
  sum.terms = {s1.terms[0], s2.terms[0]};
  sum.terms[0].profile.amp *= 2.5;
  const MatC lhs = quantize(sum, 0.0, modes).entries();
  const MatC rhs = 2.5 * quantize(s1, 0.0, modes).entries() + quantize(s2, 0.0, modes).entries();
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian matrix is the diagonal of metric norms") {
  auto modes = modes8();
  const OperatorMatrix lap = laplacian_matrix(modes);
  CHECK(lap(*modes->index_of(v2(1, 1)), *modes->index_of(v2(1, 1))) == Complex(2.0));
  CHECK(lap(*modes->index_of(v2(0, 0)), *modes->index_of(v2(0, 0))) == Complex(0.0));

  LatticeBasis b;
  b.vectors = Mat(2, 2);
  b.vectors << 1, 1, 0, 1;
  const auto skew = ModeSet::build(4.0, metric_from_basis(b));
  const OperatorMatrix lap2 = laplacian_matrix(skew);
  const int i = *skew->index_of(v2(1, 0));
  CHECK(lap2(i, i).real() == doctest::Approx(2.0).epsilon(1e-14));  // g^{11} = 2
}

TEST_CASE("dequantize reads fibers and round-trips") {
  auto modes = modes8();
  const OperatorMatrix lap = laplacian_matrix(modes);
  for (const auto& [eta, val] : dequantize(lap, v2(0, 0))) {
    CHECK(eta.is_integer());
    CHECK(val.real() ==
          doctest::Approx(modes->norm_sq(*modes->index_of(eta.integer_components()))));
  }

  const OperatorMatrix a = quantize(two_cos_x1(), 0.0, modes);
  const auto fiber = dequantize(a, v2(1, 0));
  CHECK(!fiber.empty());
  for (const auto& [eta, val] : fiber) CHECK(val == Complex(1.0));
}

TEST_CASE("dequantize then re-quantize reproduces a random Hermitian matrix") {
  auto modes = modes8();
  const OperatorMatrix a = random_hermitian(modes, 11);
  OperatorMatrix rebuilt(modes);
  for (int dx = -8; dx <= 8; ++dx)
    for (int dy = -8; dy <= 8; ++dy) {
      const VecI k = v2(dx, dy);
      for (const auto& [eta, val] : dequantize(a, k)) {
        const VecI xi = (eta.doubled() - k) / 2;
        rebuilt.entries()(*modes->index_of(VecI(xi + k)), *modes->index_of(xi)) = val;
      }
    }
  CHECK((rebuilt.entries() - a.entries()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("exact commutator identity with the laplacian") {
  auto modes = modes8();
  const OperatorMatrix g = random_hermitian(modes, 23);
  const OperatorMatrix lap = laplacian_matrix(modes);
  const MatC comm = lap.entries() * g.entries() - g.entries() * lap.entries();
  for (int j = 0; j < modes->size(); ++j)
    for (int i = 0; i < modes->size(); ++i) {
      if (g(i, j) == 0.0) continue;
      const VecI k = modes->mode(i) - modes->mode(j);
      const Covector eta = Covector::from_doubled(modes->mode(i) + modes->mode(j));
      const Complex expected =
          2.0 * inner(eta, Covector::integer(k), modes->metric()) * g(i, j);
      CHECK(std::abs(comm(i, j) - expected) <= 1e-13 * std::max(1.0, std::abs(expected)));
    }
}

TEST_CASE("conjugation by zero and by commuting diagonals is the identity") {
  auto modes = modes8();
  const OperatorMatrix a = random_hermitian(modes, 5);
  const OperatorMatrix zero(modes);
  CHECK((conjugate_exact(a, zero, 1.0).entries() - a.entries()).cwiseAbs().maxCoeff() <
        1e-14);

  const OperatorMatrix lap = laplacian_matrix(modes);
  OperatorMatrix diag(modes);
  for (int i = 0; i < modes->size(); ++i) diag.entries()(i, i) = modes->jap(i);
  CHECK((conjugate_exact(diag, lap, 0.7).entries() - diag.entries()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("two-mode conjugation matches the hand computation") {
  // A = [[0,1],[1,0]], G = diag(1,-1), tau = pi/2: e^{i tau G} = diag(i,-i)
  // and the conjugated matrix is [[0,-1],[-1,0]].
  auto modes = modes8();
  const int p = *modes->index_of(v2(0, 0));
  const int q = *modes->index_of(v2(1, 0));
  OperatorMatrix a(modes), g(modes);
  a.entries()(p, q) = a.entries()(q, p) = 1.0;
  g.entries()(p, p) = 1.0;
  g.entries()(q, q) = -1.0;
  const OperatorMatrix c = conjugate_exact(a, g, M_PI / 2);
  CHECK(c(p, q).real() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(c(q, p).real() == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(std::abs(c(p, q).imag()) < 1e-15);
}

TEST_CASE("conjugation rejects non-hermitian generators") {
  auto modes = modes8();
  OperatorMatrix g(modes);
  g.entries()(0, 1) = 1.0;  // no conjugate partner
  const OperatorMatrix a = random_hermitian(modes, 3);
  CHECK_THROWS_AS(conjugate_exact(a, g, 1.0), std::invalid_argument);
}

TEST_CASE("conjugation preserves hermiticity and the spectrum") {
  auto modes = modes8();
  const OperatorMatrix a = random_hermitian(modes, 31);
  OperatorMatrix g = random_hermitian(modes, 37);
  const OperatorMatrix c = conjugate_exact(a, g, 0.8);
  CHECK(c.hermiticity_defect() < 1e-12 * std::max(1.0, c.max_abs()));

  Eigen::SelfAdjointEigenSolver<MatC> ea(a.entries()), ec(c.entries());
  for (int i = 0; i < modes->size(); ++i) {
    const double ref = ea.eigenvalues()[i];
    CHECK(std::abs(ec.eigenvalues()[i] - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("lie series converges to the exact conjugation") {
  auto modes = modes8();
  const OperatorMatrix a = random_hermitian(modes, 41);
  OperatorMatrix g = random_hermitian(modes, 43);
  const double norm_g = sobolev_opnorm(g, 0, 0, 1e-8);
  g.entries() *= 0.15 / norm_g;

  CHECK((lie_series(a, g, 0.9, 0).entries() - a.entries()).cwiseAbs().maxCoeff() == 0.0);

  const OperatorMatrix exact = conjugate_exact(a, g, 0.9);
  double prev = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 6; ++n) {
    const double err = (lie_series(a, g, 0.9, n).entries() - exact.entries()).norm();
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev <= 1e-6 * a.frobenius());

  // [G, A] = 0 keeps every truncation equal to A.
  const OperatorMatrix lap = laplacian_matrix(modes);
  OperatorMatrix diag(modes);
  for (int i = 0; i < modes->size(); ++i) diag.entries()(i, i) = 1.0 + modes->norm_sq(i);
  CHECK((lie_series(diag, lap, 1.3, 5).entries() - diag.entries()).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("weighted operator norm: diagonal cases and the shift norm") {
  auto modes = modes8();
  SymbolSpec s;
  SymbolTerm t;
  t.order = 1.4;
  t.coeffs = {{v2(0, 0), 1.0}};
  s.terms = {t};
  const OperatorMatrix mult = quantize(s, 0.0, modes);
  CHECK(sobolev_opnorm(mult, 2.0, 0.6) == doctest::Approx(1.0).epsilon(1e-6));

  OperatorMatrix id(modes);
  id.entries().setIdentity();
  CHECK(sobolev_opnorm(id, 1.7, 1.7) == doctest::Approx(1.0).epsilon(1e-6));

  const OperatorMatrix shifts = quantize(two_cos_x1(), 0.0, modes);
  const double norm = sobolev_opnorm(shifts, 0.0, 0.0, 1e-8);
  CHECK(norm >= 1.9);
  CHECK(norm <= 2.0);
  Eigen::JacobiSVD<MatC> svd(shifts.entries());
  CHECK(norm == doctest::Approx(svd.singularValues()[0]).epsilon(1e-5));
}

TEST_CASE("hermiticity follows from symbol reality") {
  auto modes = modes8();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const OperatorMatrix a = random_hermitian(modes, seed, 4);
    CHECK(a.hermiticity_defect() <= 1e-12 * std::max(1.0, a.max_abs()));
  }
}

TEST_CASE("matrix cache round-trips and rejects mismatched mode sets") {
  auto modes = modes8();
  const OperatorMatrix a = random_hermitian(modes, 77);
  const auto path = std::filesystem::temp_directory_path() / "tnf_matrix_cache_test.bin";
  save_matrix(path, a);
  const auto back = load_matrix(path, modes);
  REQUIRE(back.has_value());
  CHECK((back->entries() - a.entries()).cwiseAbs().maxCoeff() == 0.0);

  const auto other = ModeSet::build(6.0, MetricTensor::identity(2));
  CHECK(!load_matrix(path, other).has_value());
  std::filesystem::remove(path);
}

TEST_CASE("support partition splits shift fibers into chains") {
  auto modes = modes8();
  auto part = SupportPartition::from_fibers(modes, {v2(1, 0), v2(-1, 0)});
  int rows = 0;
  for (int y = -7; y <= 7; ++y)
    if (modes->contains(v2(0, y))) ++rows;
  CHECK(part->count() == rows);
  for (int g = 0; g < part->count(); ++g) {
    const auto& grp = part->groups[g];
    for (std::size_t i = 1; i < grp.size(); ++i)
      CHECK(modes->mode(grp[i])[1] == modes->mode(grp[0])[1]);
  }

  const OperatorMatrix a = quantize(two_cos_x1(), 0.0, modes);
  const BlockMatrix ab = BlockMatrix::from_dense(part, a);
  CHECK((ab.to_dense().entries() - a.entries()).cwiseAbs().maxCoeff() == 0.0);

  OperatorMatrix bad(modes);
  bad.entries()(*modes->index_of(v2(0, 1)), *modes->index_of(v2(0, 0))) = 1.0;
  CHECK_THROWS_AS(BlockMatrix::from_dense(part, bad), std::invalid_argument);
}
