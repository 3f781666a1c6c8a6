#include "qcdiff/modelset.hpp"

#include <doctest.h>

using namespace qcdiff;

TEST_CASE("trivial internal space gives the integer comb") {
  const WeightedModelSet ms{CutProjectScheme::integer(1, 0), WeightFunction::constant(1.0)};
  const auto mat = materialize(ms, Box::interval(-5, 5));
  REQUIRE(mat.comb.size() == 11);
  for (std::size_t i = 0; i < 11; ++i) {
    CHECK(mat.comb.points()[i][0] == static_cast<double>(i) - 5.0);
    CHECK(mat.comb.weights()[i] == cplx(1.0));
  }
}

TEST_CASE("Fibonacci chain has gaps 1 and tau only") {
  const WeightedModelSet ms{CutProjectScheme::golden(), WeightFunction::of(Profile::indicator(-1.0 / kTau, 1.0))};
  const auto mat = materialize(ms, Box::interval(-7000, 7000));
  REQUIRE(mat.comb.size() > 10001);
  std::size_t shorts = 0, longs = 0;
  for (std::size_t i = 1; i < mat.comb.size(); ++i) {
    const double gap = mat.comb.points()[i][0] - mat.comb.points()[i - 1][0];
    if (std::abs(gap - 1.0) <= 1e-9) ++shorts;
    else if (std::abs(gap - kTau) <= 1e-9) ++longs;
  }
  CHECK(shorts + longs == mat.comb.size() - 1);
  // long to short tile frequency is tau
  CHECK(static_cast<double>(longs) / static_cast<double>(shorts) == doctest::Approx(kTau).epsilon(1e-3));
}

TEST_CASE("Gaussian weights are translation bounded") {
  const WeightedModelSet ms{CutProjectScheme::golden(), WeightFunction::of(Profile::gaussian(0.5))};
  double previous = -1.0;
  for (double l : {50.0, 100.0, 200.0}) {
    const auto mat = materialize(ms, Box::interval(-l, l), 1e-12);
    double wmax = 0.0;
    for (const auto& w : mat.comb.weights()) wmax = std::max(wmax, std::abs(w));
    CHECK(wmax <= 1.0);
    // enumerated-sum oracle: sup over translates of sum |h(y)| over points in t + [-1, 1]
    double brute = 0.0;
    const auto& pts = mat.comb.points();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      double s = 0.0;
      for (std::size_t j = i; j < pts.size() && pts[j][0] <= pts[i][0] + 2.0; ++j) s += std::abs(mat.comb.weights()[j]);
      brute = std::max(brute, s);
    }
    const double v = comb_norm(mat.comb, Box::interval(-1, 1));
    CHECK(v == doctest::Approx(brute).epsilon(1e-12));
    CHECK(std::isfinite(v));
    if (previous >= 0.0) CHECK(std::abs(v - previous) <= 2.0);
    previous = v;
  }
}

TEST_CASE("lattice comb diffraction") {
  const WeightedModelSet ms{CutProjectScheme::integer(1, 0), WeightFunction::constant(1.0)};
  const auto peaks = analytic_diffraction(ms, Box::interval(-3, 3), 1e-6);
  REQUIRE(peaks.peaks.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(peaks.peaks[i].frequency[0] == static_cast<double>(i) - 3.0);
    CHECK(peaks.peaks[i].intensity == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto gamma = analytic_autocorrelation(ms);
  CHECK(gamma.weight.dim() == 0);
  CHECK(gamma.weight.amplitude() == cplx(1.0));
}

TEST_CASE("golden Gaussian diffraction") {
  const double sigma = 1.3;
  const WeightedModelSet ms{CutProjectScheme::golden(), WeightFunction::of(Profile::gaussian(sigma))};
  const auto peaks = analytic_diffraction(ms, Box::interval(-3, 3), 1e-8);
  const Peak* zero = peaks.find(Vec::Zero(1));
  REQUIRE(zero != nullptr);
  // \int e^{-pi s^2 / sigma^2} ds = sigma
  CHECK(zero->intensity == doctest::Approx(sigma * sigma / 5.0).epsilon(1e-14));
  CHECK(peaks.flagged_collisions == 0);
  for (const auto& p : peaks.peaks) {
    CHECK(p.intensity >= 0.0);
    const Peak* q = peaks.find(-p.frequency);
    REQUIRE(q != nullptr);
    CHECK(q->intensity == p.intensity);
  }
  CHECK(analytic_diffraction(ms, Box::interval(-3, 3), 10.0).peaks.empty());
}

TEST_CASE("analytic autocorrelation weight") {
  const double sigma = 0.8;
  const WeightedModelSet ms{CutProjectScheme::golden(), WeightFunction::of(Profile::gaussian(sigma))};
  const auto gamma = analytic_autocorrelation(ms);
  // quadrature oracle for ||h||_2^2
  double l2 = 0.0;
  const double h = 1e-4;
  for (double s = -10; s <= 10; s += h) l2 += std::exp(-2.0 * kPi * s * s / (sigma * sigma)) * h;
  CHECK(gamma.weight(Vec::Zero(1)).real() == doctest::Approx(ms.scheme.density() * l2).epsilon(1e-10));
  for (double y : {0.1, 0.7, 2.3}) {
    const cplx a = gamma.weight(Vec::Constant(1, y)), b = gamma.weight(Vec::Constant(1, -y));
    CHECK(std::abs(a - std::conj(b)) <= 1e-15);
  }
}

TEST_CASE("indicator weights need the opt-in") {
  const WeightedModelSet ms{CutProjectScheme::golden(), WeightFunction::of(Profile::indicator(-1.0 / kTau, 1.0))};
  CHECK_THROWS_AS(analytic_diffraction(ms, Box::interval(-2, 2), 1e-4), UnsupportedWeightError);
  const auto peaks = analytic_diffraction(ms, Box::interval(-2, 2), 1e-4, true);
  const Peak* zero = peaks.find(Vec::Zero(1));
  REQUIRE(zero != nullptr);
  // window length tau, so intensity tau^2 / 5
  CHECK(zero->intensity == doctest::Approx(kTau * kTau / 5.0).epsilon(1e-14));
}
