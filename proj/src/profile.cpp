#include "qcdiff/profile.hpp"

#include <algorithm>

namespace qcdiff {

double sinc(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - (kPi * x) * (kPi * x) / 6.0;
  return std::sin(kPi * x) / (kPi * x);
}

double cardinal_bspline(int k, double x) {
  const double half = 0.5 * (k + 1);
  if (x < -half || x >= half) return 0.0;
  if (k == 0) return 1.0;
  // by symmetry evaluate on the left half, where the truncated power sum is short
  if (x > 0.0) x = -x;
  const double t = x + half;
  double sum = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= k + 1; ++j) {
    const double arg = t - j;
    if (arg <= 0.0) break;
    sum += (j % 2 == 0 ? 1.0 : -1.0) * binom * std::pow(arg, k);
    binom = binom * (k + 1 - j) / (j + 1);
  }
  double fact = 1.0;
  for (int i = 2; i <= k; ++i) fact *= i;
  return sum / fact;
}

Profile Profile::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian sigma must be positive");
  return Profile(ProfileKind::Gaussian, sigma, 0, 0.0, 0.0);
}

Profile Profile::triangle(double half_width) { return bspline(1, half_width); }

Profile Profile::bspline(int order, double width) {
  if (order < 0 || order > 12) throw ParameterError("bspline order must be in [0, 12]");
  if (!(width > 0.0)) throw ParameterError("bspline width must be positive");
  return Profile(ProfileKind::BSpline, width, order, 0.0, 0.0);
}

Profile Profile::indicator(double lo, double hi) {
  if (!(hi > lo)) throw ParameterError("indicator needs lo < hi");
  return Profile(ProfileKind::Indicator, hi - lo, 0, lo, hi);
}

Profile Profile::hermite_gaussian(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("sigma must be positive");
  return Profile(ProfileKind::HermiteGaussian, sigma, 1, 0.0, 0.0);
}

Profile Profile::shifted(double c) const {
  Profile p = *this;
  // exp(2 pi i beta s) base(s - c - c0): keep the modulation anchored at the origin
  p.center_ += c;
  return p;
}

Profile Profile::modulated(double beta) const {
  Profile p = *this;
  p.beta_ += beta;
  return p;
}

Profile Profile::times(cplx a) const {
  Profile p = *this;
  p.amp_ *= a;
  return p;
}

Profile Profile::conjugated() const {
  Profile p = *this;
  p.amp_ = std::conj(amp_);
  p.beta_ = -beta_;
  return p;
}

std::optional<Profile> Profile::reflected() const {
  Profile p = *this;
  p.center_ = -center_;
  p.beta_ = -beta_;
  switch (kind_) {
    case ProfileKind::Gaussian:
    case ProfileKind::BSpline:
      return p;
    case ProfileKind::HermiteGaussian:
      p.amp_ = -amp_;
      return p;
    case ProfileKind::Indicator:
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Profile> Profile::fourier_profile() const {
  // F[A e^{2 pi i beta s} b(s - c)](xi) = A e^{2 pi i beta c} e^{-2 pi i c xi} (F b)(xi - beta)
  const cplx phase = amp_ * std::exp(cplx(0.0, kTwoPi * beta_ * center_));
  switch (kind_) {
    case ProfileKind::Gaussian:
      return gaussian(1.0 / scale_).shifted(beta_).modulated(-center_).times(phase * scale_);
    case ProfileKind::HermiteGaussian:
      return hermite_gaussian(1.0 / scale_).shifted(beta_).modulated(-center_).times(phase * cplx(0.0, -scale_));
    default:
      return std::nullopt;
  }
}

std::string Profile::name() const {
  switch (kind_) {
    case ProfileKind::Gaussian: return "gaussian";
    case ProfileKind::BSpline: return order_ == 1 ? "triangle" : "bspline";
    case ProfileKind::Indicator: return "indicator";
    case ProfileKind::HermiteGaussian: return "hermite_gaussian";
  }
  return "?";
}

bool Profile::is_real_even() const {
  return center_ == 0.0 && beta_ == 0.0 && amp_.imag() == 0.0 &&
         (kind_ == ProfileKind::Gaussian || kind_ == ProfileKind::BSpline ||
          (kind_ == ProfileKind::Indicator && lo_ == -hi_));
}

double Profile::base(double s) const {
  switch (kind_) {
    case ProfileKind::Gaussian: return std::exp(-kPi * s * s / (scale_ * scale_));
    case ProfileKind::BSpline: return cardinal_bspline(order_, s / scale_);
    case ProfileKind::Indicator: return (s >= lo_ && s < hi_) ? 1.0 : 0.0;
    case ProfileKind::HermiteGaussian: return (s / scale_) * std::exp(-kPi * s * s / (scale_ * scale_));
  }
  return 0.0;
}

cplx Profile::base_fourier(double xi) const {
  switch (kind_) {
    case ProfileKind::Gaussian: return scale_ * std::exp(-kPi * scale_ * scale_ * xi * xi);
    case ProfileKind::BSpline: return scale_ * std::pow(sinc(scale_ * xi), order_ + 1);
    case ProfileKind::Indicator: {
      if (std::abs(xi) * scale_ < 1e-9) {
        // midpoint expansion
        const double mid = 0.5 * (lo_ + hi_);
        return scale_ * std::exp(cplx(0.0, -kTwoPi * xi * mid));
      }
      return (std::exp(cplx(0.0, -kTwoPi * xi * lo_)) - std::exp(cplx(0.0, -kTwoPi * xi * hi_))) /
             cplx(0.0, kTwoPi * xi);
    }
    case ProfileKind::HermiteGaussian:
      return cplx(0.0, -scale_ * scale_ * xi * std::exp(-kPi * scale_ * scale_ * xi * xi));
  }
  return 0.0;
}

cplx Profile::operator()(double s) const {
  cplx v = amp_ * base(s - center_);
  if (beta_ != 0.0) v *= std::exp(cplx(0.0, kTwoPi * beta_ * s));
  return v;
}

cplx Profile::fourier(double xi) const {
  const double x = xi - beta_;
  cplx v = amp_ * base_fourier(x);
  if (center_ != 0.0) v *= std::exp(cplx(0.0, -kTwoPi * x * center_));
  return v;
}

double Profile::sup_norm() const {
  const double a = std::abs(amp_);
  switch (kind_) {
    case ProfileKind::Gaussian: return a;
    case ProfileKind::BSpline: return a * cardinal_bspline(order_, 0.0);
    case ProfileKind::Indicator: return a;
    case ProfileKind::HermiteGaussian: return a / std::sqrt(kTwoPi * std::exp(1.0));
  }
  return a;
}

double Profile::l1_norm() const {
  const double a = std::abs(amp_);
  switch (kind_) {
    case ProfileKind::Gaussian: return a * scale_;
    case ProfileKind::BSpline: return a * scale_;
    case ProfileKind::Indicator: return a * scale_;
    case ProfileKind::HermiteGaussian: return a * scale_ / kPi;
  }
  return a;
}

double Profile::sup_beyond(double r) const {
  const double a = std::abs(amp_);
  r = std::max(r, 0.0);
  switch (kind_) {
    case ProfileKind::Gaussian: return a * std::exp(-kPi * r * r / (scale_ * scale_));
    case ProfileKind::BSpline: return r >= 0.5 * (order_ + 1) * scale_ ? 0.0 : sup_norm();
    case ProfileKind::Indicator: return r > std::max(std::abs(lo_), std::abs(hi_)) ? 0.0 : a;
    case ProfileKind::HermiteGaussian: {
      const double peak = scale_ / std::sqrt(kTwoPi);
      if (r <= peak) return sup_norm();
      return a * (r / scale_) * std::exp(-kPi * r * r / (scale_ * scale_));
    }
  }
  return a;
}

double Profile::fourier_sup_beyond(double r) const {
  const double a = std::abs(amp_);
  r = std::max(r, 0.0);
  switch (kind_) {
    case ProfileKind::Gaussian: return a * scale_ * std::exp(-kPi * scale_ * scale_ * r * r);
    case ProfileKind::BSpline: {
      const double env = r > 0.0 ? std::min(1.0, 1.0 / (kPi * scale_ * r)) : 1.0;
      return a * scale_ * std::pow(env, order_ + 1);
    }
    case ProfileKind::Indicator: return r > 0.0 ? a * std::min(scale_, 1.0 / (kPi * r)) : a * scale_;
    case ProfileKind::HermiteGaussian: {
      const double peak = 1.0 / (scale_ * std::sqrt(kTwoPi));
      const double rr = std::max(r, peak);
      return a * scale_ * scale_ * rr * std::exp(-kPi * scale_ * scale_ * rr * rr);
    }
  }
  return a;
}

double Profile::tail_integral(double r) const {
  const double a = std::abs(amp_);
  r = std::max(r, 0.0);
  switch (kind_) {
    case ProfileKind::Gaussian: return a * scale_ * std::erfc(std::sqrt(kPi) * r / scale_);
    case ProfileKind::BSpline: return r >= 0.5 * (order_ + 1) * scale_ ? 0.0 : l1_norm();
    case ProfileKind::Indicator: return r > std::max(std::abs(lo_), std::abs(hi_)) ? 0.0 : l1_norm();
    case ProfileKind::HermiteGaussian:
      return a * scale_ / kPi * std::exp(-kPi * r * r / (scale_ * scale_));
  }
  return l1_norm();
}

namespace {
template <class F>
double bisect_radius(F&& bound, double eps) {
  if (bound(0.0) <= eps) return 0.0;
  double hi = 1.0;
  while (bound(hi) > eps) {
    hi *= 2.0;
    if (hi > 1e12) throw ParameterError("profile does not decay below the requested threshold");
  }
  double lo = hi / 2.0;
  if (bound(lo) <= eps) lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (bound(mid) > eps ? lo : hi) = mid;
  }
  return hi;
}
}  // namespace

double Profile::support_radius(double eps) const {
  if (kind_ == ProfileKind::BSpline) return 0.5 * (order_ + 1) * scale_;
  if (kind_ == ProfileKind::Indicator) return std::max(std::abs(lo_), std::abs(hi_));
  return bisect_radius([this](double r) { return sup_beyond(r); }, eps);
}

double Profile::fourier_radius(double eps) const {
  return bisect_radius([this](double r) { return fourier_sup_beyond(r); }, eps);
}

std::optional<Profile> Profile::autocorrelation() const {
  const double a2 = std::norm(amp_);
  std::optional<Profile> out;
  switch (kind_) {
    case ProfileKind::Gaussian:
      out = gaussian(scale_ * std::sqrt(2.0)).times(a2 * scale_ / std::sqrt(2.0));
      break;
    case ProfileKind::BSpline:
      out = bspline(2 * order_ + 1, scale_).times(a2 * scale_);
      break;
    case ProfileKind::Indicator:
      out = triangle(scale_).times(a2 * scale_);
      break;
    case ProfileKind::HermiteGaussian:
      return std::nullopt;
  }
  if (beta_ != 0.0) out = out->modulated(beta_);
  return out;
}

}  // namespace qcdiff
