#include "qcdiff/amalgam.hpp"
#include "qcdiff/bupu.hpp"
#include "qcdiff/modelset.hpp"

#include <doctest.h>

#include <random>

using namespace qcdiff;

namespace {

// direct summation of max(0, 1 - |x - k a| / a) over the lattice a Z
double hat_sum(double x, double a) {
  double s = 0.0;
  for (long long k = static_cast<long long>(std::floor(x / a)) - 2; k <= static_cast<long long>(std::floor(x / a)) + 2; ++k)
    s += std::max(0.0, 1.0 - std::abs(x - static_cast<double>(k) * a) / a);
  return s;
}

std::vector<double> fibonacci_points(double lo, double hi) {
  WeightedModelSet ms{CutProjectScheme::golden(), WeightFunction::of(Profile::indicator(-1.0 / kTau, 1.0))};
  std::vector<double> xs;
  const auto mat = materialize(ms, Box::interval(lo, hi));
  for (const auto& p : mat.comb.points()) xs.push_back(p[0]);
  return xs;
}

}  // namespace

TEST_CASE("triangular BUPU values at half-integers and integers") {
  const Bupu phi = triangular_bupu(1.0, Box::interval(-10, 10));
  for (int m = -5; m <= 4; ++m) {
    const Vec x = Vec::Constant(1, m + 0.5);
    const auto act = phi.active(x);
    REQUIRE(act.size() == 2);
    for (auto i : act) CHECK(phi[i](x) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(phi.sum_at(x) == doctest::Approx(1.0).epsilon(1e-15));
    const Vec z = Vec::Constant(1, m);
    std::size_t nonzero = 0;
    for (auto i : phi.active(z))
      if (phi[i](z) != 0.0) {
        ++nonzero;
        CHECK(phi[i](z) == 1.0);
      }
    CHECK(nonzero == 1);
  }
}

TEST_CASE("triangular BUPU with spacing 0.25 sums to one") {
  const Bupu phi = triangular_bupu(0.25, Box::interval(-10, 10));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  double worst = 0.0, worst_oracle = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double x = u(rng);
    worst = std::max(worst, std::abs(phi.sum_at(Vec::Constant(1, x)) - 1.0));
    worst_oracle = std::max(worst_oracle, std::abs(hat_sum(x, 0.25) - 1.0));
  }
  CHECK(worst <= 1e-12);
  CHECK(worst_oracle <= 1e-12);
}

TEST_CASE("product BUPU") {
  const Bupu a = triangular_bupu(1.0, Box::interval(-6, 6));
  const Bupu p = product_bupu(a, a);
  CHECK(p.norm_m() == 1.0);
  CHECK(p.overlap_b() <= 25);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 1000; ++i) {
    Vec x(2);
    x << u(rng), u(rng);
    CHECK(std::abs(p.sum_at(x) - hat_sum(x[0], 1.0) * hat_sum(x[1], 1.0)) <= 1e-12);
    CHECK(std::abs(p.sum_at(x) - 1.0) <= 1e-12);
  }
  CHECK(verify_axioms(p, p.coverage(), 10000, 3).passes());
}

TEST_CASE("smoothed indicators") {
  const BoxIndicatorFamily raw{1.0, Box::interval(-20, 20), 1.0};
  const Bupu s = smooth_bupu(raw, 0.5);
  CHECK(s.norm_m() <= 1.0 + 1e-15);  // ||1_Q||_inf ||psi||_1
  const auto rep = verify_axioms(s, s.coverage(), 10000, 4);
  CHECK(rep.max_sum_deviation <= 1e-10);
  CHECK(rep.passes());

  // quadrature oracle: (1_[k-1/2, k+1/2) * psi)(x) with psi the area-one triangle of half width 0.5
  const double w = 0.5;
  auto psi = [&](double t) { return std::max(0.0, 1.0 - std::abs(t) / w) / w; };
  auto oracle = [&](double x, double k) {
    const int n = 20000;
    const double lo = k - 0.5, hi = k + 0.5, h = (hi - lo) / n;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += psi(x - (lo + (i + 0.5) * h)) * h;
    return acc;
  };
  std::size_t compared = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k = s[i].center()[0];
    if (std::abs(k) > 2.0) continue;
    for (double x = k - 0.9; x <= k + 0.9; x += 0.05) {
      CHECK(s[i](x) == doctest::Approx(oracle(x, k)).epsilon(1e-6));
      ++compared;
    }
  }
  CHECK(compared > 50);
}

TEST_CASE("narrow mollifier reproduces the indicators away from jumps") {
  const Bupu s = smooth_bupu(BoxIndicatorFamily{1.0, Box::interval(-5, 5), 1.0}, 1e-3);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double k = s[i].center()[0];
    CHECK(s[i](k) == doctest::Approx(1.0));
    CHECK(s[i](k + 0.4) == doctest::Approx(1.0));
    CHECK(s[i](k + 0.6) == doctest::Approx(0.0));
  }
}

TEST_CASE("Delone-centred BUPU") {
  const auto psi = BumpFunction::triangle(0.0, 2.0, 2.0);
  std::vector<double> z;
  for (int k = -30; k <= 30; ++k) z.push_back(k);
  const Bupu b = delone_bupu(z, psi, Box::interval(-1, 1), Box::interval(-20, 20));
  CHECK(verify_axioms(b, b.coverage(), 10000, 2).max_sum_deviation <= 1e-10);

  std::vector<double> gap = z;
  gap.erase(std::find(gap.begin(), gap.end(), 0.0));
  // with psi of half width 1 the translates vanish at the removed point
  const auto narrow = BumpFunction::triangle(0.0, 1.0, 2.0);
  CHECK_NOTHROW(delone_bupu(z, narrow, Box::interval(-0.5, 0.5), Box::interval(-20, 20)));
  CHECK_THROWS_AS(delone_bupu(gap, narrow, Box::interval(-0.5, 0.5), Box::interval(-20, 20)), GeometryError);

  const auto fib = fibonacci_points(-56, 56);
  const Bupu f = delone_bupu(fib, psi, Box::interval(-1, 1), Box::interval(-50, 50));
  CHECK(verify_axioms(f, f.coverage(), 10000, 6).passes());
  // oracle: sum of translates of psi stays >= 1 on a 1e-3 grid
  double low = 1e9;
  for (double x = -50; x <= 50; x += 1e-3) {
    double s = 0.0;
    for (double c : fib) s += std::max(0.0, 2.0 * (1.0 - std::abs(x - c) / 2.0));
    low = std::min(low, s);
  }
  CHECK(low >= 1.0);
}

TEST_CASE("refinement") {
  const Bupu phi = triangular_bupu(1.0, Box::interval(-20, 20));
  const Bupu r = refine(phi, phi);
  const auto mult = r.center_multiplicities();
  CHECK(*std::max_element(mult.begin(), mult.end()) <= 3);
  CHECK(verify_axioms(r, r.coverage(), 10000, 7).max_sum_deviation <= 1e-10);

  const Bupu psi = triangular_bupu(0.5, Box::interval(-20, 20));
  const Bupu phi_psi = refine(phi, psi);
  std::mt19937_64 rng(21);
  for (int i = 0; i < 20; ++i) {
    const auto f = random_piecewise_linear(-8.0 + i * 0.2, -2.0 + i * 0.5, 6, rng(), i % 2 == 0);
    const double lhs = std::max(wiener_norm(f, phi), wiener_norm(f, psi));
    CHECK(lhs <= wiener_norm(f, phi_psi) * (1.0 + 1e-12));
  }
}

TEST_CASE("axiom verification") {
  const Bupu phi = triangular_bupu(1.0, Box::interval(-20, 20));
  const auto rep = verify_axioms(phi, phi.coverage(), 10000, 1);
  CHECK(rep.measured_overlap <= 5);
  CHECK(rep.sandwich_upper == 5.0);
  CHECK(rep.sandwich_holds);
  CHECK(rep.passes());
  // exact overlap count on the centres: x_i + U meets x_j + U for |i - j| <= 2
  CHECK(overlap_count(phi.centers(), phi.size_u()) == 5);

  const Bupu bad = phi.with_scaled_function(phi.size() / 2, 1.1);
  const auto broken = verify_axioms(bad, bad.coverage(), 10000, 1);
  CHECK(broken.max_sum_deviation >= 0.05);
  CHECK_FALSE(broken.passes());
}
