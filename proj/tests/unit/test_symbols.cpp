#include <doctest.h>

#include "torusnf/symbols.hpp"

using namespace torusnf;

namespace {

VecI v2(int a, int b) {
  VecI v(2);
  v << a, b;
  return v;
}

Vec x2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// 2cos(x1) <xi>^order with an arbitrary profile.
SymbolTerm cos_term(double order, TimeProfile profile = TimeProfile::constant(1.0)) {
  SymbolTerm t;
  t.profile = profile;
  t.order = order;
  t.coeffs = {{v2(1, 0), 1.0}, {v2(-1, 0), 1.0}};
  return t;
}

}  // namespace

TEST_CASE("evaluate_coefficient reads the fiber coefficient") {
  const MetricTensor id = MetricTensor::identity(2);
  SymbolSpec spec;
  SymbolTerm term;
  term.order = 0;
  term.coeffs = {{v2(1, 0), 1.0}};
  spec.terms = {term};

  CHECK(evaluate_coefficient(spec, 0.3, v2(1, 0), x2(5, 2), id) == Complex(1.0));
  CHECK(evaluate_coefficient(spec, 0.3, v2(2, 0), x2(5, 2), id) == Complex(0.0));

  spec.terms[0].order = 1;
  const Complex v = evaluate_coefficient(spec, 0.0, v2(1, 0), x2(0.5, 0), id);
  CHECK(v.real() == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  CHECK(v.imag() == 0.0);
}

TEST_CASE("reality characterization conj(c_{-k}) = c_k") {
  SymbolSpec cos_spec;
  cos_spec.terms = {cos_term(0)};
  CHECK(is_real_valued(cos_spec));

  SymbolSpec bad;
  SymbolTerm t;
  t.coeffs = {{v2(1, 0), Complex(0, 1)}, {v2(-1, 0), Complex(0, 1)}};
  bad.terms = {t};
  CHECK(!is_real_valued(bad));

  SymbolSpec conj_pair;
  t.coeffs = {{v2(1, 0), Complex(1, 1)}, {v2(-1, 0), Complex(1, -1)}};
  conj_pair.terms = {t};
  CHECK(is_real_valued(conj_pair));
}

TEST_CASE("time derivative is exact within the trig family") {
  SymbolSpec spec;
  spec.terms = {cos_term(0, TimeProfile::cosine(1.0, 2.0))};
  const SymbolSpec d = time_derivative(spec);
  REQUIRE(d.terms.size() == 1);
  CHECK(d.terms[0].profile.kind == ProfileKind::sine);
  CHECK(d.terms[0].profile.amp == -2.0);
  CHECK(d.terms[0].profile.omega == 2.0);

  SymbolSpec with_const = spec;
  with_const.terms.push_back(cos_term(1));  // constant profile
  CHECK(time_derivative(with_const).terms.size() == 1);

  const SymbolSpec dd = time_derivative(d);
  REQUIRE(dd.terms.size() == 1);
  CHECK(dd.terms[0].profile.kind == ProfileKind::cosine);
  CHECK(dd.terms[0].profile.amp == -4.0);  // -omega^2 times the original

  SymbolSpec zero;
  zero.terms = {cos_term(0)};
  CHECK(time_derivative(zero).terms.empty());
}

TEST_CASE("profile values are consistent with their derivatives") {
  const TimeProfile p = TimeProfile::cosine(0.7, 3.0);
  const TimeProfile dp = p.derivative();
  const double h = 1e-6;
  for (double t : {0.0, 0.4, 1.7}) {
    const double fd = (p.value(t + h) - p.value(t - h)) / (2 * h);
    CHECK(dp.value(t) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("seminorm of a pure radial weight is one") {
  const MetricTensor id = MetricTensor::identity(2);
  SymbolSpec spec;
  SymbolTerm t;
  t.order = 1.3;
  t.coeffs = {{v2(0, 0), 1.0}};
  spec.terms = {t};
  std::vector<Vec> grid;
  for (double x : {0.5, 2.0, 7.5, 13.0}) grid.push_back(x2(x, 1.0));
  CHECK(estimate_seminorm(spec, 0, 0, 0.6, id, grid) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("seminorm picks up exact x derivatives") {
  const MetricTensor id = MetricTensor::identity(2);
  SymbolSpec spec;
  spec.terms = {cos_term(0)};
  std::vector<Vec> grid = {x2(3, 0)};
  // sup |d/dx 2cos(x1)| = 2, measured on a dense x grid.
  CHECK(estimate_seminorm(spec, 1, 0, 0.6, id, grid) == doctest::Approx(2.0).epsilon(1e-3));
  SymbolSpec zero;
  CHECK(estimate_seminorm(zero, 2, 1, 0.6, id, grid) == 0.0);
}

TEST_CASE("seminorm scales linearly with amplitude when N2 = 0") {
  const MetricTensor id = MetricTensor::identity(2);
  SymbolSpec one, three;
  one.terms = {cos_term(0.5)};
  three.terms = {cos_term(0.5, TimeProfile::constant(3.0))};
  std::vector<Vec> grid = {x2(1, 1), x2(4, -2)};
  const double s1 = estimate_seminorm(one, 0, 0, 0.6, id, grid);
  const double s3 = estimate_seminorm(three, 0, 0, 0.6, id, grid);
  CHECK(s3 == doctest::Approx(3.0 * s1).epsilon(1e-12));
}

TEST_CASE("seminorm xi derivative tracks the radial order") {
  const MetricTensor id = MetricTensor::identity(2);
  SymbolSpec spec;
  SymbolTerm t;
  t.order = 1.0;
  t.coeffs = {{v2(0, 0), 1.0}};
  spec.terms = {t};
  // d/dxi <xi> = xi/<xi>, so the delta-weighted ratio stays bounded and is
  // largest where <xi>^{1-delta} dominates.
  std::vector<Vec> grid;
  for (double x : {2.0, 6.0, 10.0}) grid.push_back(x2(x, 0));
  const double s = estimate_seminorm(spec, 0, 1, 0.6, id, grid);
  CHECK(s > 0.1);
  CHECK(s < 10.0);

  CHECK_THROWS_AS(estimate_seminorm(spec, 0, 1, 0.6, id, {}), std::invalid_argument);
}
