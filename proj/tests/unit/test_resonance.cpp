#include <doctest.h>

#include "torusnf/resonance.hpp"

using namespace torusnf;

namespace {

VecI v2(int a, int b) {
  VecI v(2);
  v << a, b;
  return v;
}

NFParams reference_params() { return NFParams{0.6, 0.04, 1.0, 1.0, 2}; }

SymbolSpec two_cos_x1(double order) {
  SymbolSpec s;
  SymbolTerm t;
  t.order = order;
  t.coeffs = {{v2(1, 0), 1.0}, {v2(-1, 0), 1.0}};
  s.terms = {t};
  return s;
}

OperatorMatrix random_hermitian(const ModeSetPtr& modes, std::uint64_t seed) {
  CounterRng rng(seed);
  SymbolSpec spec;
  SymbolTerm t;
  t.order = 0.8;
  for (int i = 0; i < 4; ++i) {
    VecI k(2);
    k << static_cast<int>(rng.next_u64() % 5) - 2, static_cast<int>(rng.next_u64() % 5) - 2;
    if (k.isZero()) k << 0, 1;
    const Complex c = rng.cnormal();
    t.coeffs.emplace_back(k, c);
    t.coeffs.emplace_back(VecI(-k), std::conj(c));
  }
  spec.terms = {t};
  return quantize(spec, 0.0, modes);
}

}  // namespace

TEST_CASE("parameter constraints: reference set passes with delta* = 0.92") {
  const NFParams p = reference_params();
  CHECK(validate_params(p).empty());
  CHECK(p.delta_star() == doctest::Approx(0.92).epsilon(1e-12));
}

TEST_CASE("parameter constraints: each violation is named") {
  NFParams p = reference_params();
  p.epsilon = 0.3;  // epsilon (tau+1) = 0.6, not < delta
  auto errs = validate_params(p);
  REQUIRE(!errs.empty());
  bool found = false;
  for (const auto& e : errs) found |= e.find("epsilon (tau+1) >= delta") != std::string::npos;
  CHECK(found);

  p = reference_params();
  p.tau = 0.5;
  errs = validate_params(p);
  found = false;
  for (const auto& e : errs) found |= e.find("tau < d-1") != std::string::npos;
  CHECK(found);

  p = reference_params();
  p.m = 1.3;  // m >= 2 delta = 1.2
  errs = validate_params(p);
  found = false;
  for (const auto& e : errs) found |= e.find("m >= 2 delta") != std::string::npos;
  CHECK(found);

  p = reference_params();
  p.delta = 1.1;
  errs = validate_params(p);
  CHECK(!errs.empty());
}

TEST_CASE("cutoff function values") {
  CHECK(chi(0.3) == 1.0);
  CHECK(chi(-1.5) == 0.0);
  CHECK(chi(0.5) == 1.0);
  CHECK(chi(1.0) == 0.0);
  CHECK(chi(0.75) == doctest::Approx(0.5).epsilon(1e-15));
  for (double y : {0.55, 0.6, 0.8, 0.95}) {
    CHECK(chi(y) == chi(-y));
    CHECK(chi(y) > 0.0);
    CHECK(chi(y) < 1.0);
  }
  // monotone on the blend zone
  double prev = 1.0;
  for (double y = 0.5; y <= 1.0; y += 0.01) {
    const double c = chi(y);
    CHECK(c <= prev + 1e-15);
    prev = c;
  }
}

TEST_CASE("chi_k at the midpoint") {
  const MetricTensor id = MetricTensor::identity(2);
  const NFParams p = reference_params();

  // orthogonal: the argument vanishes
  CHECK(chi_k(Covector::integer(v2(0, 5)), v2(1, 0), p, id) == 1.0);

  // argument ~ 5.01 >= 1 -> 0  (2 * 10 / <(10,0)>^0.6)
  CHECK(chi_k(Covector::integer(v2(10, 0)), v2(1, 0), p, id) == 0.0);
  const double arg = 2.0 * 10.0 / std::pow(std::sqrt(101.0), 0.6);
  CHECK(arg > 1.0);

  // evenness in k
  CounterRng rng(9);
  for (int i = 0; i < 50; ++i) {
    VecI eta2(2), k(2);
    eta2 << static_cast<int>(rng.next_u64() % 21) - 10, static_cast<int>(rng.next_u64() % 21) - 10;
    k << static_cast<int>(rng.next_u64() % 3) - 1, static_cast<int>(rng.next_u64() % 3) - 1;
    if (k.isZero()) k << 1, 0;
    const Covector eta = Covector::from_doubled(eta2);
    CHECK(chi_k(eta, k, p, id) == doctest::Approx(chi_k(eta, VecI(-k), p, id)).epsilon(1e-14));
  }

  CHECK_THROWS_AS(chi_k(Covector::integer(v2(1, 1)), v2(0, 0), p, id), std::invalid_argument);
}

TEST_CASE("tilde_chi_k support edges") {
  const MetricTensor id = MetricTensor::identity(2);
  NFParams p = reference_params();

  // |k| = 1 and <eta>^eps >= 2  ->  ratio <= 1/2  ->  1
  p.epsilon = 0.5;
  CHECK(tilde_chi_k(Covector::integer(v2(8, 0)), v2(1, 0), p, id) == 1.0);

  // ratio >= 1 -> 0 (at eta = 0 the bracket is 1)
  CHECK(tilde_chi_k(Covector::integer(v2(0, 0)), v2(1, 0), p, id) == 0.0);

  // reference scale: ratio = 1/<(10,0)>^0.04 ~ 0.912 -> strictly between
  p = reference_params();
  const double v = tilde_chi_k(Covector::integer(v2(10, 0)), v2(1, 0), p, id);
  CHECK(v > 0.0);
  CHECK(v < 1.0);
  const double ratio = 1.0 / std::pow(std::sqrt(101.0), 0.04);
  CHECK(ratio == doctest::Approx(0.9122).epsilon(1e-3));
  CHECK(v == doctest::Approx(chi(ratio)).epsilon(1e-14));
}

TEST_CASE("decompose: diagonal input is pure average") {
  const auto modes = ModeSet::build(6.0, MetricTensor::identity(2));
  OperatorMatrix a(modes);
  for (int i = 0; i < modes->size(); ++i) a.entries()(i, i) = 1.0 + modes->norm_sq(i);
  const Decomposition d = decompose(a, reference_params());
  CHECK((d.avg.entries() - a.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(d.res.max_abs() == 0.0);
  CHECK(d.nr.max_abs() == 0.0);
  CHECK(d.smooth.max_abs() == 0.0);
}

TEST_CASE("decompose reproduces the input exactly and matches the mask oracle") {
  const auto modes = ModeSet::build(12.0, MetricTensor::identity(2));
  const NFParams p = reference_params();
  const OperatorMatrix a = quantize(two_cos_x1(0.0), 0.0, modes);
  const Decomposition d = decompose(a, p);

  const MatC sum =
      d.avg.entries() + d.res.entries() + d.nr.entries() + d.smooth.entries();
  CHECK((sum - a.entries()).cwiseAbs().maxCoeff() <= 1e-14 * a.max_abs());

  // Brute-force oracle: recompute the three weights from their definitions.
  for (int j = 0; j < modes->size(); ++j)
    for (int i = 0; i < modes->size(); ++i) {
      if (a(i, j) == 0.0) continue;
      const VecI k = modes->mode(i) - modes->mode(j);
      REQUIRE(!k.isZero());
      const Covector eta = Covector::from_doubled(modes->mode(i) + modes->mode(j));
      const double kn = std::sqrt(norm_sq(k, modes->metric()));
      const double jb = jap_bracket(eta, modes->metric());
      const double c =
          chi(2.0 * std::pow(kn, p.tau) * inner(eta, Covector::integer(k), modes->metric()) /
              std::pow(jb, p.delta));
      const double ct = chi(kn / std::pow(jb, p.epsilon));
      CHECK(d.res(i, j) == a(i, j) * (c * ct));
      CHECK(d.nr(i, j) == a(i, j) * ((1.0 - c) * ct));
      CHECK(d.smooth(i, j) == a(i, j) * (1.0 - ct));
    }
}

TEST_CASE("partition of unity holds to a couple of ulp") {
  const MetricTensor id = MetricTensor::identity(2);
  const NFParams p = reference_params();
  CounterRng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    VecI eta2(2), k(2);
    eta2 << static_cast<int>(rng.next_u64() % 41) - 20, static_cast<int>(rng.next_u64() % 41) - 20;
    k << static_cast<int>(rng.next_u64() % 5) - 2, static_cast<int>(rng.next_u64() % 5) - 2;
    if (k.isZero()) k << 1, 0;
    const MaskWeights w = decomposition_weights(Covector::from_doubled(eta2), k, p, id);
    CHECK(std::abs(w.res + w.nr + w.smooth - 1.0) <= 4e-16);
    CHECK(w.res >= 0.0);
    CHECK(w.nr >= 0.0);
    CHECK(w.smooth >= 0.0);
  }
}

TEST_CASE("decomposition preserves hermiticity part by part") {
  const auto modes = ModeSet::build(8.0, MetricTensor::identity(2));
  const OperatorMatrix a = random_hermitian(modes, 17);
  REQUIRE(a.hermiticity_defect() <= 1e-12);
  const Decomposition d = decompose(a, reference_params());
  const double scale = std::max(1.0, a.max_abs());
  CHECK(d.avg.hermiticity_defect() <= 1e-12 * scale);
  CHECK(d.res.hermiticity_defect() <= 1e-12 * scale);
  CHECK(d.nr.hermiticity_defect() <= 1e-12 * scale);
  CHECK(d.smooth.hermiticity_defect() <= 1e-12 * scale);
}

TEST_CASE("normal form predicate") {
  const auto modes = ModeSet::build(12.0, MetricTensor::identity(2));
  const NFParams p = reference_params();

  OperatorMatrix diag(modes);
  for (int i = 0; i < modes->size(); ++i) diag.entries()(i, i) = modes->jap(i);
  CHECK(is_normal_form(diag, p));

  const OperatorMatrix a = quantize(two_cos_x1(0.0), 0.0, modes);
  CHECK(!is_normal_form(a, p));

  const Decomposition d = decompose(a, p);
  OperatorMatrix zpart(modes->size() ? modes : modes);
  zpart.entries() = d.avg.entries() + d.res.entries();
  CHECK(is_normal_form(zpart, p));

  // nr support carries the small-divisor lower bound |<eta|k>| > <eta>^d/(4|k|^t).
  for (int j = 0; j < modes->size(); ++j)
    for (int i = 0; i < modes->size(); ++i) {
      if (d.nr(i, j) == 0.0) continue;
      const VecI k = modes->mode(i) - modes->mode(j);
      const Covector eta = Covector::from_doubled(modes->mode(i) + modes->mode(j));
      const double kn = std::sqrt(norm_sq(k, modes->metric()));
      const double bound = std::pow(jap_bracket(eta, modes->metric()), p.delta) /
                           (4.0 * std::pow(kn, p.tau));
      CHECK(std::abs(inner(eta, Covector::integer(k), modes->metric())) >= bound * (1 - 1e-12));
    }
}

TEST_CASE("block and dense decompositions agree") {
  const auto modes = ModeSet::build(10.0, MetricTensor::identity(2));
  const NFParams p = reference_params();
  const SymbolSpec spec = two_cos_x1(1.0);
  const OperatorMatrix a = quantize(spec, 0.0, modes);
  auto part = SupportPartition::from_fibers(modes, spec.fourier_support());
  const BlockMatrix ab = quantize_blocks(spec, 0.0, part);
  CHECK((ab.to_dense().entries() - a.entries()).cwiseAbs().maxCoeff() == 0.0);

  const Decomposition dd = decompose(a, p);
  const BlockDecomposition bd = decompose(ab, p);
  CHECK((bd.avg.to_dense().entries() - dd.avg.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((bd.res.to_dense().entries() - dd.res.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((bd.nr.to_dense().entries() - dd.nr.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((bd.smooth.to_dense().entries() - dd.smooth.entries()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(is_normal_form(bd.avg + bd.res, p));
}
