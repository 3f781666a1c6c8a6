#include "qcdiff/core.hpp"

#include <algorithm>

namespace qcdiff {

Box::Box(Vec center, Vec half_widths)
    : center_(std::move(center)), half_widths_(std::move(half_widths)) {
  if (center_.size() != half_widths_.size())
    throw ParameterError("box center and half widths differ in dimension");
  for (Eigen::Index i = 0; i < half_widths_.size(); ++i)
    if (!(half_widths_[i] > 0.0) || !std::isfinite(half_widths_[i]) || !std::isfinite(center_[i]))
      throw ParameterError("box half widths must be positive and finite");
}

Box Box::interval(double lo, double hi) {
  if (!(hi > lo)) throw ParameterError("interval needs lo < hi");
  return Box(Vec::Constant(1, 0.5 * (lo + hi)), Vec::Constant(1, 0.5 * (hi - lo)));
}

Box Box::cube(int dim, double half_width) {
  return Box(Vec::Zero(dim), Vec::Constant(dim, half_width));
}

Box Box::from_bounds(const Vec& lo, const Vec& hi) {
  return Box(0.5 * (lo + hi), 0.5 * (hi - lo));
}

double Box::volume() const {
  double v = 1.0;
  for (Eigen::Index i = 0; i < half_widths_.size(); ++i) v *= 2.0 * half_widths_[i];
  return v;
}

double Box::surface() const {
  const auto d = half_widths_.size();
  if (d == 0) return 0.0;
  if (d == 1) return 2.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < d; ++i) {
    double face = 1.0;
    for (Eigen::Index j = 0; j < d; ++j)
      if (j != i) face *= 2.0 * half_widths_[j];
    s += 2.0 * face;
  }
  return s;
}

bool Box::contains(const Vec& p) const { return contains(p, 0.0); }

bool Box::contains(const Vec& p, double slack) const {
  for (Eigen::Index i = 0; i < center_.size(); ++i)
    if (std::abs(p[i] - center_[i]) > half_widths_[i] + slack) return false;
  return true;
}

bool Box::contains(const Box& other) const {
  for (Eigen::Index i = 0; i < center_.size(); ++i)
    if (std::abs(other.center_[i] - center_[i]) + other.half_widths_[i] > half_widths_[i] * (1 + 1e-15) + 1e-15)
      return false;
  return true;
}

bool Box::intersects(const Box& other) const {
  for (Eigen::Index i = 0; i < center_.size(); ++i)
    if (std::abs(other.center_[i] - center_[i]) > half_widths_[i] + other.half_widths_[i]) return false;
  return true;
}

bool Box::overlaps(const Box& other) const {
  for (Eigen::Index i = 0; i < center_.size(); ++i)
    if (std::abs(other.center_[i] - center_[i]) >= half_widths_[i] + other.half_widths_[i]) return false;
  return true;
}

Box Box::grown(const Box& u) const { return Box(center_ + u.center_, half_widths_ + u.half_widths_); }

Box Box::shrunk(const Box& u) const {
  Vec r = half_widths_ - u.half_widths_;
  if ((r.array() <= 0.0).any()) throw GeometryError("window is smaller than the erosion neighbourhood");
  return Box(center_ - u.center_, r);
}

Box Box::difference(const Box& other) const {
  return Box(center_ - other.center_, half_widths_ + other.half_widths_);
}

Box Box::product(const Box& other) const {
  Vec c(dim() + other.dim()), r(dim() + other.dim());
  c << center_, other.center_;
  r << half_widths_, other.half_widths_;
  return Box(c, r);
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

double max_abs_diff(const Vec& a, const Vec& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace qcdiff
