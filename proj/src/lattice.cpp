#include "qcdiff/lattice.hpp"

#include <cmath>
#include <string>

namespace qcdiff {

Mat dual_lattice(const Mat& basis) {
  if (basis.rows() != basis.cols() || basis.rows() == 0)
    throw RankError("lattice basis must be a non-empty square matrix");
  Eigen::FullPivLU<Mat> lu(basis);
  if (!lu.isInvertible()) throw RankError("lattice basis is singular");
  return lu.inverse().transpose();
}

CutProjectScheme::CutProjectScheme(int d, int m, Mat basis) : d_(d), m_(m), basis_(std::move(basis)) {
  if (d < 0 || m < 0 || d + m == 0) throw ParameterError("scheme dimensions must be nonnegative with d+m > 0");
  if (basis_.rows() != d + m || basis_.cols() != d + m)
    throw ParameterError("basis must be (d+m)x(d+m), got " + std::to_string(basis_.rows()) + "x" +
                         std::to_string(basis_.cols()));
  dual_basis_ = dual_lattice(basis_);
  density_ = 1.0 / std::abs(basis_.determinant());
}

CutProjectScheme CutProjectScheme::integer(int d, int m) {
  return CutProjectScheme(d, m, Mat::Identity(d + m, d + m));
}

CutProjectScheme CutProjectScheme::golden() {
  Mat b(2, 2);
  b << 1.0, kTau, 1.0, -1.0 / kTau;
  return CutProjectScheme(1, 1, b);
}

CutProjectScheme CutProjectScheme::dual() const { return CutProjectScheme(d_, m_, dual_basis_); }

CutProjectScheme CutProjectScheme::scaled(double factor) const {
  return CutProjectScheme(d_, m_, basis_ * factor);
}

Vec CutProjectScheme::point(const std::vector<long long>& coords) const {
  Vec z(dim());
  for (int i = 0; i < dim(); ++i) z[i] = static_cast<double>(coords[i]);
  return basis_ * z;
}

namespace {

template <class Visit>
void scan(const CutProjectScheme& scheme, const Box& physical_box, const Box& internal_box,
          std::uint64_t cap, Visit&& visit) {
  const int d = scheme.physical_dim();
  const int m = scheme.internal_dim();
  const int n = d + m;
  if (physical_box.dim() != d || internal_box.dim() != m)
    throw ParameterError("box dimensions do not match the scheme");

  const Box product = physical_box.product(internal_box);
  const Vec lo = product.lower();
  const Vec hi = product.upper();
  const Mat& b = scheme.basis();
  const Mat binv = scheme.dual_basis().transpose();

  std::vector<long long> zlo(n), zhi(n);
  long double candidates = 1.0L;
  for (int i = 0; i < n; ++i) {
    double c = binv.row(i).dot(product.center());
    double r = binv.row(i).cwiseAbs().dot(product.half_widths());
    zlo[i] = static_cast<long long>(std::floor(c - r)) - 1;
    zhi[i] = static_cast<long long>(std::ceil(c + r)) + 1;
    candidates *= static_cast<long double>(zhi[i] - zlo[i] + 1);
  }
  if (candidates > static_cast<long double>(cap))
    throw CapacityError("lattice enumeration would scan " + std::to_string(static_cast<double>(candidates)) +
                        " candidate tuples (cap " + std::to_string(cap) + ")");

  std::vector<long long> z(zlo);
  Vec zd(n);
  const Vec last_col = b.col(n - 1);
  while (true) {
    // partial image of the outer coordinates
    Vec partial = Vec::Zero(n);
    for (int i = 0; i < n - 1; ++i) partial += b.col(i) * static_cast<double>(z[i]);

    double tmin = static_cast<double>(zlo[n - 1]);
    double tmax = static_cast<double>(zhi[n - 1]);
    bool feasible = true;
    for (int k = 0; k < n && feasible; ++k) {
      const double a = last_col[k];
      if (a == 0.0) {
        if (partial[k] < lo[k] - 1e-9 * (1 + std::abs(lo[k])) || partial[k] > hi[k] + 1e-9 * (1 + std::abs(hi[k])))
          feasible = false;
        continue;
      }
      double t1 = (lo[k] - partial[k]) / a;
      double t2 = (hi[k] - partial[k]) / a;
      if (t1 > t2) std::swap(t1, t2);
      tmin = std::max(tmin, t1);
      tmax = std::min(tmax, t2);
    }
    if (feasible && tmin <= tmax + 2.0) {
      const long long t0 = std::max(zlo[n - 1], static_cast<long long>(std::ceil(tmin)) - 1);
      const long long t1 = std::min(zhi[n - 1], static_cast<long long>(std::floor(tmax)) + 1);
      for (long long t = t0; t <= t1; ++t) {
        z[n - 1] = t;
        for (int i = 0; i < n; ++i) zd[i] = static_cast<double>(z[i]);
        Vec p = b * zd;
        if (physical_box.contains(p.head(d)) && internal_box.contains(p.tail(m))) visit(z, p);
      }
    }
    // odometer over coordinates 0..n-2, last index fastest
    int i = n - 2;
    while (i >= 0) {
      if (++z[i] <= zhi[i]) break;
      z[i] = zlo[i];
      --i;
    }
    if (i < 0) break;
  }
}

}  // namespace

std::vector<LatticePoint> enumerate_points(const CutProjectScheme& scheme, const Box& physical_box,
                                           const Box& internal_box, std::uint64_t cap) {
  std::vector<LatticePoint> out;
  const int d = scheme.physical_dim();
  const int m = scheme.internal_dim();
  scan(scheme, physical_box, internal_box, cap, [&](const std::vector<long long>& z, const Vec& p) {
    out.push_back(LatticePoint{p.head(d), p.tail(m), z});
  });
  return out;
}

std::size_t count_points(const CutProjectScheme& scheme, const Box& physical_box, const Box& internal_box,
                         std::uint64_t cap) {
  std::size_t count = 0;
  scan(scheme, physical_box, internal_box, cap, [&](const std::vector<long long>&, const Vec&) { ++count; });
  return count;
}

}  // namespace qcdiff
