#pragma once

// Closed-form one-dimensional profiles with exact Fourier transforms.
//
//   f(s) = A * exp(2 pi i beta s) * base(s - c)
//
// base is one of
//   gaussian(sigma)        exp(-pi s^2 / sigma^2),     transform sigma exp(-pi sigma^2 xi^2)
//   bspline(k, w)          B_k(s / w), B_0 = 1_[-1/2,1/2), B_k = B_0^{*(k+1)},
//                          transform w sinc(w xi)^(k+1)
//   indicator(lo, hi)      1_[lo,hi)
//   hermite_gaussian(s)    (s / sigma) exp(-pi s^2 / sigma^2)
// with transforms F f(xi) = \int f(s) exp(-2 pi i xi s) ds.

#include "qcdiff/core.hpp"

#include <optional>
#include <string>

namespace qcdiff {

enum class ProfileKind { Gaussian, BSpline, Indicator, HermiteGaussian };

class Profile {
 public:
  static Profile gaussian(double sigma);
  /// B_1(s / half_width): max(0, 1 - |s| / half_width)
  static Profile triangle(double half_width);
  static Profile bspline(int order, double width);
  static Profile indicator(double lo, double hi);
  static Profile hermite_gaussian(double sigma);

  Profile shifted(double c) const;
  Profile modulated(double beta) const;
  Profile times(cplx a) const;
  Profile conjugated() const;
  /// f(-s), when expressible.
  std::optional<Profile> reflected() const;
  /// Fourier transform as a profile, when expressible (Gaussian and
  /// Hermite-Gaussian).
  std::optional<Profile> fourier_profile() const;

  ProfileKind kind() const { return kind_; }
  std::string name() const;
  double scale() const { return scale_; }
  int order() const { return order_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double center() const { return center_; }
  double modulation() const { return beta_; }
  cplx amplitude() const { return amp_; }

  cplx operator()(double s) const;
  /// \int f(s) e^{-2 pi i xi s} ds
  cplx fourier(double xi) const;
  /// \int f(s) e^{+2 pi i eta s} ds
  cplx inverse_fourier(double eta) const { return fourier(-eta); }

  /// Belongs to the Feichtinger algebra (false for indicators).
  bool in_w0() const { return kind_ != ProfileKind::Indicator; }
  bool is_real_even() const;

  double sup_norm() const;
  double l1_norm() const;
  double integral_abs_bound() const { return l1_norm(); }
  /// Bound on |f(s)| for |s - c| >= r.
  double sup_beyond(double r) const;
  /// Bound on |F f(xi)| for |xi - beta| >= r.
  double fourier_sup_beyond(double r) const;
  /// Bound on \int_{|s - c| >= r} |f|.
  double tail_integral(double r) const;
  /// Smallest r with sup_beyond(r) <= eps (exact support radius when compact).
  double support_radius(double eps) const;
  double fourier_radius(double eps) const;

  /// f * f~ (u) = \int f(u + t) conj f(t) dt when available in closed form.
  std::optional<Profile> autocorrelation() const;

 private:
  Profile(ProfileKind k, double scale, int order, double lo, double hi)
      : kind_(k), scale_(scale), order_(order), lo_(lo), hi_(hi) {}
  double base(double s) const;
  cplx base_fourier(double xi) const;

  ProfileKind kind_;
  double scale_ = 1.0;
  int order_ = 0;
  double lo_ = 0.0, hi_ = 0.0;
  double center_ = 0.0;
  double beta_ = 0.0;
  cplx amp_{1.0, 0.0};
};

/// Centered cardinal B-spline of order k (degree k), support [-(k+1)/2, (k+1)/2].
double cardinal_bspline(int k, double x);

/// sin(pi x) / (pi x)
double sinc(double x);

}  // namespace qcdiff
