#include "qcdiff/lattice.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace qcdiff;

namespace {

// all n b1 + k b2 of the golden lattice with |n|, |k| <= reach, filtered by the boxes
std::set<std::pair<long long, long long>> golden_brute(const Box& phys, const Box& internal, long long reach) {
  std::set<std::pair<long long, long long>> out;
  for (long long n = -reach; n <= reach; ++n)
    for (long long k = -reach; k <= reach; ++k) {
      const double x = static_cast<double>(n) + static_cast<double>(k) * kTau;
      const double y = static_cast<double>(n) - static_cast<double>(k) / kTau;
      if (phys.contains(Vec::Constant(1, x)) && internal.contains(Vec::Constant(1, y))) out.insert({n, k});
    }
  return out;
}

}  // namespace

TEST_CASE("dual basis is the inverse transpose") {
  CHECK((dual_lattice(Mat::Identity(2, 2)) - Mat::Identity(2, 2)).norm() == 0.0);
  Mat b = Mat::Zero(2, 2);
  b(0, 0) = 2.0;
  b(1, 1) = 0.5;
  const Mat d = dual_lattice(b);
  CHECK(d(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d(1, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(d(0, 1) == 0.0);
  CHECK(d(1, 0) == 0.0);

  // <b_i, b*_j> = delta_ij for the golden scheme
  const auto g = CutProjectScheme::golden();
  const Mat gram = g.basis().transpose() * g.dual_basis();
  CHECK((gram - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("golden density from |det| agrees with point counting") {
  const auto g = CutProjectScheme::golden();
  CHECK(g.density() == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-15));
  // counting oracle: lattice points in [-R, R]^2 over (2R)^2
  const double r = 200.0;
  std::size_t count = 0;
  for (long long n = -700; n <= 700; ++n)
    for (long long k = -700; k <= 700; ++k) {
      const double x = static_cast<double>(n) + static_cast<double>(k) * kTau;
      const double y = static_cast<double>(n) - static_cast<double>(k) / kTau;
      if (std::abs(x) <= r && std::abs(y) <= r) ++count;
    }
  CHECK(static_cast<double>(count) / (4.0 * r * r) == doctest::Approx(g.density()).epsilon(5e-3));
}

TEST_CASE("integer lattice enumeration") {
  const auto z2 = CutProjectScheme::integer(1, 1);
  const auto pts = enumerate_points(z2, Box::interval(-1.5, 1.5), Box::interval(-0.5, 0.5));
  std::vector<std::vector<long long>> got;
  for (const auto& p : pts) got.push_back(p.coords);
  std::sort(got.begin(), got.end());
  CHECK(got == std::vector<std::vector<long long>>{{-1, 0}, {0, 0}, {1, 0}});
}

TEST_CASE("golden enumeration matches a brute-force loop") {
  const auto g = CutProjectScheme::golden();
  const Box phys = Box::interval(-10, 10), internal = Box::interval(-1, 1);
  const auto pts = enumerate_points(g, phys, internal);
  std::set<std::pair<long long, long long>> got;
  for (const auto& p : pts) {
    got.insert({p.coords[0], p.coords[1]});
    CHECK(p.x[0] == doctest::Approx(static_cast<double>(p.coords[0]) + kTau * static_cast<double>(p.coords[1])));
  }
  CHECK(got.size() == pts.size());
  CHECK(got == golden_brute(phys, internal, 50));
  // dens * vol(phys) * vol(window) = 0.4472 * 20 * 2
  CHECK(std::abs(static_cast<double>(pts.size()) - g.density() * 40.0) <= 2.0);
}

TEST_CASE("windows far from the origin") {
  // the internal projection of the golden lattice is dense, so a far window
  // still meets it about dens * 10 * 2 times
  const auto g = CutProjectScheme::golden();
  const Box phys = Box::interval(-5, 5), far = Box::interval(999, 1001);
  const auto pts = enumerate_points(g, phys, far);
  std::set<std::pair<long long, long long>> got;
  for (const auto& p : pts) got.insert({p.coords[0], p.coords[1]});
  CHECK(got == golden_brute(phys, far, 1000));
  CHECK(count_points(g, phys, far) == pts.size());
  // Z^2 has no internal coordinates strictly between two integers
  const auto z2 = CutProjectScheme::integer(1, 1);
  CHECK(enumerate_points(z2, Box::interval(-5, 5), Box::interval(0.2, 0.8)).empty());
}

TEST_CASE("scaling the basis scales the density") {
  const auto z = CutProjectScheme::integer(2, 0);
  CHECK(z.scaled(2.0).density() == doctest::Approx(0.25).epsilon(1e-15));
  const auto g = CutProjectScheme::golden();
  CHECK(g.scaled(2.0).density() == doctest::Approx(g.density() / 4.0).epsilon(1e-15));
}

TEST_CASE("singular basis is rejected") {
  Mat b(2, 2);
  b << 1, 2, 2, 4;
  CHECK_THROWS_AS(CutProjectScheme(1, 1, b), RankError);
}
