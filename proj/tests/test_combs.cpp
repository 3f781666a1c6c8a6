#include "qcdiff/combs.hpp"
#include "qcdiff/modelset.hpp"

#include <doctest.h>

#include <map>

using namespace qcdiff;

namespace {

WeightedComb fibonacci(double half_width) {
  WeightedModelSet ms{CutProjectScheme::golden(), WeightFunction::of(Profile::indicator(-1.0 / kTau, 1.0))};
  return materialize(ms, Box::interval(-half_width, half_width)).comb;
}

WeightedComb integers(long long lo, long long hi, const Box& window) {
  std::vector<Vec> pts;
  for (long long k = lo; k <= hi; ++k) pts.push_back(Vec::Constant(1, static_cast<double>(k)));
  return WeightedComb::dirac(std::move(pts), window);
}

}  // namespace

TEST_CASE("geometry of the integer comb") {
  const auto z = WeightedComb::lattice_1d(Box::interval(-100, 100));
  const auto g = geometry(z, Box::interval(-1, 1));
  CHECK(g.uniformly_discrete);
  CHECK(g.separation_radius == 0.5);
  CHECK(g.covering_radius == 0.5);
  CHECK(g.comb_norm_k == 3.0);
}

TEST_CASE("Fibonacci chain tiles are 1 and tau") {
  const auto fib = fibonacci(100);
  const auto g = geometry(fib, Box::interval(-1, 1));
  // oracle: direct gap scan of the sorted points
  double smallest = 1e9, largest = 0.0;
  for (std::size_t i = 1; i < fib.size(); ++i) {
    const double gap = fib.points()[i][0] - fib.points()[i - 1][0];
    CHECK((std::abs(gap - 1.0) <= 1e-9 || std::abs(gap - kTau) <= 1e-9));
    smallest = std::min(smallest, gap);
    largest = std::max(largest, gap);
  }
  CHECK(g.separation_radius == doctest::Approx(smallest / 2.0).epsilon(1e-12));
  CHECK(g.separation_radius == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(g.covering_radius == doctest::Approx(kTau / 2.0).epsilon(1e-9));
}

TEST_CASE("repeated points are not uniformly discrete") {
  std::vector<Vec> pts{Vec::Constant(1, 0.0), Vec::Constant(1, 1.0), Vec::Constant(1, 1.0)};
  const WeightedComb c = WeightedComb::dirac(pts, Box::interval(-2, 2));
  CHECK(c.size() == 2);
  CHECK(c.max_multiplicity() == 2);
  const auto g = geometry(c, Box::interval(-0.1, 0.1));
  CHECK_FALSE(g.uniformly_discrete);
  CHECK(g.max_multiplicity == 2);
  CHECK(g.comb_norm_k == 2.0);
}

TEST_CASE("restriction") {
  const auto z = WeightedComb::lattice_1d(Box::interval(-100, 100));
  const auto r = restrict(z, Box::interval(-2.5, 2.5));
  CHECK(r.size() == 5);
  const auto twice = restrict(r, Box::interval(-10, 10));
  CHECK(twice.points() == r.points());
  CHECK(twice.weights() == r.weights());
  std::vector<Vec> pts{Vec::Constant(1, 0.25), Vec::Constant(1, 1.5)};
  const WeightedComb c(pts, {cplx(0.3, -0.7), cplx(2.0, 1.0)}, Box::interval(-5, 5));
  const auto rc = restrict(c, Box::interval(0, 1));
  REQUIRE(rc.size() == 1);
  CHECK(rc.weights()[0] == cplx(0.3, -0.7));
}

TEST_CASE("finite autocorrelation of a block of integers") {
  const long long n = 12;
  const auto c = integers(0, n - 1, Box::interval(-1, static_cast<double>(n)));
  const auto gamma = autocorrelation_finite(c, static_cast<double>(n));
  // pair-count oracle
  std::map<long long, double> want;
  for (long long i = 0; i < n; ++i)
    for (long long j = 0; j < n; ++j) want[i - j] += 1.0 / static_cast<double>(n);
  REQUIRE(gamma.size() == want.size());
  std::size_t i = 0;
  for (const auto& [k, v] : want) {
    CHECK(gamma.points()[i][0] == static_cast<double>(k));
    CHECK(gamma.weights()[i].real() == doctest::Approx(static_cast<double>(n - std::abs(k)) / n).epsilon(1e-14));
    ++i;
  }
  CHECK(gamma.weights()[static_cast<std::size_t>(n - 1)].real() == doctest::Approx(1.0));
}

TEST_CASE("single point and hermitian symmetry") {
  const WeightedComb one({Vec::Constant(1, 0.7)}, {cplx(3.0, -4.0)}, Box::interval(-1, 1));
  const auto g1 = autocorrelation_finite(one, 1.0);
  REQUIRE(g1.size() == 1);
  CHECK(g1.points()[0][0] == 0.0);
  CHECK(g1.weights()[0] == cplx(25.0, 0.0));

  std::vector<Vec> pts;
  std::vector<cplx> w;
  for (int i = 0; i < 30; ++i) {
    pts.push_back(Vec::Constant(1, 0.37 * i * i - 2.0 * i));
    w.emplace_back(std::cos(i), std::sin(2.0 * i));
  }
  const auto g = autocorrelation_finite(WeightedComb(pts, w, Box::interval(-200, 400)), 3.0);
  const std::size_t m = g.size();
  for (std::size_t i = 0; i < m; ++i) {
    CHECK(g.points()[i][0] == -g.points()[m - 1 - i][0]);
    CHECK(g.weights()[i] == std::conj(g.weights()[m - 1 - i]));
  }
}

TEST_CASE("evaluation against test functions") {
  const auto c = integers(-10, 10, Box::interval(-10, 10));
  auto f = [](const Vec& x) { return cplx(std::max(0.0, 1.0 - std::abs(x[0] - 0.5))); };
  CHECK(evaluate(c, f).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evaluate(c, [](const Vec&) { return cplx(0.0); }) == cplx(0.0));
  auto g = [](const Vec& x) { return cplx(std::exp(-x[0] * x[0]), x[0]); };
  const cplx sum = evaluate(c, [&](const Vec& x) { return f(x) + g(x); });
  CHECK(std::abs(sum - evaluate(c, f) - evaluate(c, g)) <= 1e-12);
}
