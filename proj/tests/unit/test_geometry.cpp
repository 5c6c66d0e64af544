#include <doctest.h>

#include "torusnf/modes.hpp"

using namespace torusnf;

namespace {

VecI v2(int a, int b) {
  VecI v(2);
  v << a, b;
  return v;
}

LatticeBasis skew_basis() {
  LatticeBasis b;
  b.vectors = Mat(2, 2);
  b.vectors << 1, 1, 0, 1;  // e1 = (1,0), e2 = (1,1)
  return b;
}

}  // namespace

TEST_CASE("metric from an orthonormal basis is the identity") {
  const MetricTensor m = metric_from_basis(LatticeBasis::identity(2));
  CHECK(m.g().isApprox(Mat::Identity(2, 2), 1e-15));
  CHECK(m.g_inv().isApprox(Mat::Identity(2, 2), 1e-15));
}

TEST_CASE("metric from a skew basis matches the hand-inverted matrix") {
  const MetricTensor m = metric_from_basis(skew_basis());
  Mat g(2, 2), ginv(2, 2);
  g << 1, 1, 1, 2;
  ginv << 2, -1, -1, 1;  // hand inversion of [[1,1],[1,2]]
  CHECK(m.g().isApprox(g, 1e-14));
  CHECK(m.g_inv().isApprox(ginv, 1e-14));
  CHECK((m.g() * m.g_inv() - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dependent basis vectors are rejected") {
  LatticeBasis b;
  b.vectors = Mat(2, 2);
  b.vectors << 1, 2, 0, 0;  // e2 = 2 e1
  CHECK_THROWS_WITH_AS(metric_from_basis(b),
                       doctest::Contains("degenerate lattice"), std::invalid_argument);
}

TEST_CASE("inner product examples") {
  const MetricTensor id = MetricTensor::identity(2);
  CHECK(inner(v2(1, 0), v2(0, 1), id) == 0.0);
  CHECK(inner(v2(0, 0), v2(0, 0), id) == 0.0);

  // With g_inv = [[2,-1],[-1,1]]: <(1,0)|(0,1)> = g^{12} = -1 by hand.
  const MetricTensor m = metric_from_basis(skew_basis());
  CHECK(inner(v2(1, 0), v2(0, 1), m) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("inner product rejects mismatched dimensions") {
  const MetricTensor id = MetricTensor::identity(2);
  VecI x(3);
  x << 1, 2, 3;
  CHECK_THROWS_AS(inner(x, x, id), std::invalid_argument);
}

TEST_CASE("inner is symmetric and bilinear on random integer covectors") {
  const MetricTensor m = metric_from_basis(skew_basis());
  CounterRng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    VecI a(2), b(2), c(2);
    for (int i = 0; i < 2; ++i) {
      a[i] = static_cast<int>(rng.next_u64() % 41) - 20;
      b[i] = static_cast<int>(rng.next_u64() % 41) - 20;
      c[i] = static_cast<int>(rng.next_u64() % 41) - 20;
    }
    const double sym = std::abs(inner(a, b, m) - inner(b, a, m));
    CHECK(sym <= 1e-12 * (1.0 + std::abs(inner(a, b, m))));
    const double lin =
        std::abs(inner(VecI(a + 2 * b), c, m) - (inner(a, c, m) + 2.0 * inner(b, c, m)));
    CHECK(lin <= 1e-12 * (1.0 + std::abs(inner(a, c, m)) + std::abs(inner(b, c, m))));
  }
}

TEST_CASE("japanese bracket examples and properties") {
  const MetricTensor id = MetricTensor::identity(2);
  CHECK(jap_bracket(v2(0, 0), id) == 1.0);
  CHECK(jap_bracket(v2(3, 4), id) == doctest::Approx(std::sqrt(26.0)).epsilon(1e-14));

  const MetricTensor m = metric_from_basis(skew_basis());
  // |(1,0)|^2 = g^{11} = 2 by hand, so <(1,0)> = sqrt(3).
  CHECK(jap_bracket(v2(1, 0), m) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

  CounterRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    VecI x(2);
    x << static_cast<int>(rng.next_u64() % 31) - 15,
        static_cast<int>(rng.next_u64() % 31) - 15;
    const double nx = std::sqrt(norm_sq(x, m));
    const double jb = jap_bracket(x, m);
    CHECK(jb >= std::max(1.0, nx) - 1e-12);
    CHECK(jap_bracket(VecI(2 * x), m) >= jb - 1e-12);
    if (!x.isZero()) CHECK(inner(x, x, m) > 0.0);
  }
}

TEST_CASE("covector midpoints stay exact") {
  const Covector eta = Covector::midpoint(v2(3, -2), v2(1, 0));
  CHECK(eta.doubled() == v2(7, -4));
  CHECK(!eta.is_integer());
  CHECK(Covector::integer(v2(3, -2)).is_integer());
  const MetricTensor id = MetricTensor::identity(2);
  CHECK(inner(eta, Covector::integer(v2(1, 0)), id) == doctest::Approx(3.5));
}

TEST_CASE("mode set is lexicographic, closed under negation, metric-aware") {
  const MetricTensor id = MetricTensor::identity(2);
  const auto modes = ModeSet::build(4.0, id);
  // |xi|^2 <= 15: hand count for the disc of radius sqrt(15).
  int count = 0;
  for (int x = -4; x <= 4; ++x)
    for (int y = -4; y <= 4; ++y)
      if (x * x + y * y <= 15) ++count;
  CHECK(modes->size() == count);

  for (int i = 0; i + 1 < modes->size(); ++i) {
    const VecI& a = modes->mode(i);
    const VecI& b = modes->mode(i + 1);
    const bool lex_less = a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    CHECK(lex_less);
  }
  for (int i = 0; i < modes->size(); ++i) {
    CHECK(modes->contains(VecI(-modes->mode(i))));
    CHECK(*modes->index_of(modes->mode(i)) == i);
    CHECK(modes->jap(i) == doctest::Approx(jap_bracket(modes->mode(i), id)));
  }
  CHECK(!modes->contains(v2(4, 1)));
}

TEST_CASE("mode set under a scaled metric") {
  LatticeBasis b;
  b.vectors = Mat(2, 2);
  b.vectors << 0.5, 0, 0, 0.5;  // covector norms double
  const MetricTensor m = metric_from_basis(b);
  const auto modes = ModeSet::build(4.0, m);
  // |xi|_g^2 = 4 |xi|_e^2 <= 15  =>  |xi|_e^2 <= 3.75.
  int count = 0;
  for (int x = -2; x <= 2; ++x)
    for (int y = -2; y <= 2; ++y)
      if (4 * (x * x + y * y) <= 15) ++count;
  CHECK(modes->size() == count);
}
