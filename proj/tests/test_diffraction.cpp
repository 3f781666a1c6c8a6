#include "qcdiff/diffraction.hpp"

#include <doctest.h>

using namespace qcdiff;

namespace {

WeightedComb integers(long long lo, long long hi, const Box& window) {
  std::vector<Vec> pts;
  for (long long k = lo; k <= hi; ++k) pts.push_back(Vec::Constant(1, static_cast<double>(k)));
  return WeightedComb::dirac(std::move(pts), window);
}

const WeightedModelSet kGoldenGauss{CutProjectScheme::golden(), WeightFunction::of(Profile::gaussian(1.0))};

}  // namespace

TEST_CASE("van Hove boxes") {
  const auto seq = VanHoveSequence::arithmetic(2, 10.0, 20);
  CHECK(seq.half_width(3) == 30.0);
  for (int n = 1; n < seq.max_n(); ++n) CHECK(seq.box(n + 1).contains(seq.box(n)));
  const Box k = Box::cube(2, 1.0);
  for (int n = 1; n <= seq.max_n(); ++n) {
    const double l = seq.half_width(n);
    // exact for centred squares: ((2L + 2)^2 - (2L - 2)^2) / (2L)^2 = 4 / L
    CHECK(seq.boundary_ratio(n, k) == doctest::Approx(4.0 / l).epsilon(1e-12));
  }
}

TEST_CASE("Fourier-Bohr coefficients of the integer comb") {
  const auto z = integers(-60, 60, Box::interval(-60, 60));
  const auto seq = VanHoveSequence::arithmetic(1, 1.0, 50);
  const auto a0 = fourier_bohr(z, Vec::Zero(1), seq);
  const auto ah = fourier_bohr(z, Vec::Constant(1, 0.5), seq);
  for (int n = 1; n <= 50; ++n) {
    const auto i = static_cast<std::size_t>(n - 1);
    CHECK(a0.values[i].real() == doctest::Approx((2.0 * n + 1.0) / (2.0 * n)).epsilon(1e-14));
    double alt = 0.0;  // alternating-sum oracle
    for (int k = -n; k <= n; ++k) alt += (k % 2 == 0 ? 1.0 : -1.0);
    CHECK(std::abs(ah.values[i] - cplx(alt / (2.0 * n))) <= 1e-13);
  }
  CHECK(std::abs(a0.extrapolated - 1.0) <= 1.0 / 50);
  CHECK(std::abs(ah.extrapolated) <= 1.0 / 50);
  CHECK_THROWS_AS(fourier_bohr(z, Vec::Zero(1), VanHoveSequence::arithmetic(1, 1.0, 70)), GeometryError);
}

TEST_CASE("Fourier-Bohr coefficients of the golden Gaussian comb") {
  const auto peaks = analytic_diffraction(kGoldenGauss, Box::interval(-2, 2), 1e-3);
  const auto seq = VanHoveSequence::arithmetic(1, 20.0, 20);
  const auto mat = materialize(kGoldenGauss, Box::interval(-401, 401));
  for (const auto& p : peaks.peaks) {
    const auto a = fourier_bohr(mat.comb, p.frequency, seq);
    // dens h^(eta) in closed form: h^ of e^{-pi s^2} is e^{-pi eta^2}
    const cplx want = kGoldenGauss.scheme.density() * std::exp(-kPi * p.internal[0] * p.internal[0]);
    CHECK(std::abs(p.amplitude - want) <= 1e-15);
    for (std::size_t n = 0; n < a.values.size(); ++n) CHECK(std::abs(a.values[n] - want) <= 10.0 / a.half_widths[n]);
  }
}

TEST_CASE("uniformity in translates") {
  const auto z = integers(-300, 300, Box::interval(-300, 300));
  const auto seq = VanHoveSequence(1, {200.0});
  const auto u = translate_uniformity_check(z, Vec::Zero(1), seq, {Vec::Constant(1, 0.3), Vec::Constant(1, 7.7)});
  CHECK(u.max_deviation <= 3.0 / 200.0);

  const auto half = integers(0, 600, Box::interval(-600, 600));
  const auto un = translate_uniformity_check(half, Vec::Zero(1), seq, {Vec::Constant(1, -100.0)});
  CHECK(un.max_deviation >= 0.2);

  const WeightedComb zero({}, {}, Box::interval(-300, 300));
  CHECK(translate_uniformity_check(zero, Vec::Zero(1), seq, {Vec::Constant(1, 5.0)}).max_deviation == 0.0);
}

TEST_CASE("empirical intensities") {
  const auto z = integers(-120, 120, Box::interval(-120, 120));
  const auto seq = VanHoveSequence::arithmetic(1, 25.0, 4);
  const auto e = empirical_diffraction(z, seq, {Vec::Zero(1), Vec::Constant(1, 0.5)});
  const auto& last = e.stages.back();
  CHECK(std::abs(last.route_a[0] - 1.0) <= 2.0 / last.half_width);
  CHECK(std::abs(last.route_b[0] - 1.0) <= 2.0 / last.taper_radius);
  CHECK(last.route_a[1] <= 1.0 / last.half_width);
  CHECK(std::abs(last.route_b[1]) <= 1.0 / last.taper_radius);

  // a single point: a = w / vol, so |a|^2 vanishes like vol^-2
  const WeightedComb one({Vec::Constant(1, 0.0)}, {cplx(2.0, 0.0)}, Box::interval(-100, 100));
  const auto s = empirical_diffraction(one, VanHoveSequence(1, {10.0, 100.0}), {Vec::Zero(1)});
  CHECK(s.stages[0].route_a[0] == doctest::Approx(4.0 / 400.0));
  CHECK(s.stages[1].route_a[0] == doctest::Approx(4.0 / 40000.0));
}

TEST_CASE("Poisson summation") {
  // Z^2 as a scheme with d = m = 1 and g = h = e^{-pi s^2}: both sides are theta(1)^2
  const auto z2 = CutProjectScheme::integer(1, 1);
  const WeightFunction gauss = WeightFunction::of(Profile::gaussian(1.0));
  const auto rep = psf_verify(z2, gauss, gauss, 8.0);
  double theta = 0.0;
  for (int n = -30; n <= 30; ++n) theta += std::exp(-kPi * n * n);
  CHECK(rep.lhs.real() == doctest::Approx(theta * theta).epsilon(1e-14));
  CHECK(rep.residual <= 1e-12);

  const auto golden = CutProjectScheme::golden();
  const auto g = psf_verify(golden, gauss, gauss, 8.0);
  CHECK(g.residual <= 1e-10);
  CHECK(g.pass);
  // independent summation of the left side over |n|, |k| <= 40
  double lhs = 0.0;
  for (int n = -40; n <= 40; ++n)
    for (int k = -40; k <= 40; ++k) {
      const double x = n + k * kTau, y = n - k / kTau;
      lhs += std::exp(-kPi * (x * x + y * y));
    }
  CHECK(g.lhs.real() == doctest::Approx(lhs).epsilon(1e-13));
  CHECK(psf_verify(golden, gauss, gauss, 2.0).residual >= g.residual);
}

TEST_CASE("density formula") {
  const auto seq = VanHoveSequence::arithmetic(1, 10.0, 20);
  const auto rep = density_formula_check(kGoldenGauss, seq, {Vec::Zero(1), Vec::Constant(1, 0.3), Vec::Constant(1, 12.7)});
  CHECK(rep.target == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-14));
  for (std::size_t n = 0; n < rep.half_widths.size(); ++n) {
    CHECK(rep.residual[n] <= 5.0 / rep.half_widths[n]);
    CHECK(rep.shift_deviation[n] <= 5.0 / rep.half_widths[n]);
  }
  const WeightedModelSet none{CutProjectScheme::golden(), WeightFunction({Profile::gaussian(1.0)}, 0.0)};
  const auto zero = density_formula_check(none, seq, {Vec::Zero(1)});
  for (double r : zero.ratios[0]) CHECK(r == 0.0);
}

TEST_CASE("off-peak frequencies avoid the peaks") {
  const auto peaks = analytic_diffraction(kGoldenGauss, Box::interval(-4, 4), 1e-10);
  const ExclusionRule rule;
  const auto off = off_peak_frequencies(peaks, Box::interval(-3, 3), 50, 7, rule);
  CHECK(off.size() == 50);
  for (const auto& x : off)
    for (const auto& p : peaks.peaks) {
      if (std::abs(p.amplitude) < rule.amplitude_floor) continue;
      CHECK(std::abs(x[0] - p.frequency[0]) > std::max(rule.min_radius, rule.amplitude_factor * std::abs(p.amplitude)));
    }
}

TEST_CASE("Wiener diagram for the golden Gaussian comb and the half-line") {
  WienerDiagramOptions opt;
  const WeightedModelSet ms{CutProjectScheme::golden(), WeightFunction::of(Profile::gaussian(0.6))};
  const auto rep = wiener_diagram_report(ms, 200.0, opt);
  CHECK(rep.commutes());
  CHECK(rep.peaks > 10);

  const auto half = integers(0, 400, Box::interval(-400, 400));
  const auto c = comb_commutativity(half, 200.0, Vec::Zero(1));
  CHECK(c.amplitude.real() == doctest::Approx(201.0 / 400.0));
  CHECK(c.route_a == doctest::Approx(0.25).epsilon(1e-2));
  CHECK_FALSE(c.commutes(0.05));
}

TEST_CASE("finite autocorrelations are positive definite") {
  const auto mat = materialize(kGoldenGauss, Box::interval(-60, 60));
  const auto battery = bump_battery(1);
  CHECK(battery.size() == 20);
  for (double l : {20.0, 40.0, 60.0}) {
    const auto local = restrict(mat.comb, Box::interval(-l, l));
    const auto gamma = autocorrelation_finite(local, 2.0 * l);
    CHECK(hermitian_exact(gamma));
    const auto pd = positive_definiteness(gamma, battery);
    CHECK(pd.tests == 20);
    CHECK(pd.passes(1e-10));
  }
}
