#include "qcdiff/modelset.hpp"

#include <algorithm>

namespace qcdiff {

WeightFunction::WeightFunction(std::vector<Profile> factors, cplx amplitude)
    : factors_(std::move(factors)), amplitude_(amplitude) {
  if (!std::isfinite(amplitude_.real()) || !std::isfinite(amplitude_.imag()))
    throw ParameterError("weight amplitude must be finite");
}

std::string WeightFunction::describe() const {
  if (factors_.empty()) return "constant";
  std::string s;
  for (std::size_t k = 0; k < factors_.size(); ++k) s += (k ? " x " : "") + factors_[k].name();
  return s;
}

cplx WeightFunction::operator()(const Vec& y) const {
  if (y.size() != dim()) throw ParameterError("weight evaluated at a point of the wrong dimension");
  cplx v = amplitude_;
  for (int k = 0; k < dim(); ++k) v *= factors_[static_cast<std::size_t>(k)](y[k]);
  return v;
}

cplx WeightFunction::inverse_fourier(const Vec& eta) const {
  if (eta.size() != dim()) throw ParameterError("transform evaluated at a point of the wrong dimension");
  cplx v = amplitude_;
  for (int k = 0; k < dim(); ++k) v *= factors_[static_cast<std::size_t>(k)].inverse_fourier(eta[k]);
  return v;
}

bool WeightFunction::in_w0() const {
  return std::all_of(factors_.begin(), factors_.end(), [](const Profile& p) { return p.in_w0(); });
}

bool WeightFunction::is_real_even() const {
  return amplitude_.imag() == 0.0 &&
         std::all_of(factors_.begin(), factors_.end(), [](const Profile& p) { return p.is_real_even(); });
}

double WeightFunction::sup_norm() const {
  double s = std::abs(amplitude_);
  for (const auto& p : factors_) s *= p.sup_norm();
  return s;
}

double WeightFunction::fourier_sup_norm() const {
  double s = std::abs(amplitude_);
  for (const auto& p : factors_) s *= p.fourier_sup_beyond(0.0);
  return s;
}

double WeightFunction::l1_norm() const {
  double s = std::abs(amplitude_);
  for (const auto& p : factors_) s *= p.l1_norm();
  return s;
}

namespace {

// product of `values` leaving out index k
double others(const std::vector<double>& values, std::size_t k) {
  double p = 1.0;
  for (std::size_t j = 0; j < values.size(); ++j)
    if (j != k) p *= values[j];
  return p;
}

// distance from c to the nearest face of box along axis k (negative if outside)
double inner_radius(const Box& box, int k, double c) {
  return std::min(box.upper()[k] - c, c - box.lower()[k]);
}

}  // namespace

Box WeightFunction::cutoff_box(double eps) const {
  if (!(eps > 0.0)) throw ParameterError("tail threshold must be positive");
  if (factors_.empty()) return Box::empty_space();
  std::vector<double> sups;
  for (const auto& p : factors_) sups.push_back(p.sup_norm());
  Vec c(dim()), r(dim());
  for (int k = 0; k < dim(); ++k) {
    const auto& p = factors_[static_cast<std::size_t>(k)];
    const double scale = std::abs(amplitude_) * others(sups, static_cast<std::size_t>(k));
    if (p.kind() == ProfileKind::Indicator) {
      c[k] = p.center() + 0.5 * (p.lo() + p.hi());
      r[k] = 0.5 * (p.hi() - p.lo());
      continue;
    }
    c[k] = p.center();
    r[k] = scale > 0.0 ? p.support_radius(eps / scale) : 0.0;
    if (r[k] <= 0.0) r[k] = 1e-300;
  }
  return Box(c, r);
}

Box WeightFunction::fourier_cutoff_box(double eps) const {
  if (!(eps > 0.0)) throw ParameterError("tail threshold must be positive");
  if (factors_.empty()) return Box::empty_space();
  std::vector<double> sups;
  for (const auto& p : factors_) sups.push_back(p.fourier_sup_beyond(0.0));
  Vec c(dim()), r(dim());
  for (int k = 0; k < dim(); ++k) {
    const auto& p = factors_[static_cast<std::size_t>(k)];
    const double scale = std::abs(amplitude_) * others(sups, static_cast<std::size_t>(k));
    // the inverse transform peaks at -beta
    c[k] = -p.modulation();
    r[k] = scale > 0.0 ? p.fourier_radius(eps / scale) : 0.0;
    if (r[k] <= 0.0) r[k] = 1e-300;
  }
  return Box(c, r);
}

double WeightFunction::tail_mass_outside(const Box& box) const {
  if (factors_.empty()) return 0.0;
  std::vector<double> l1;
  for (const auto& p : factors_) l1.push_back(p.l1_norm());
  double total = 0.0;
  for (int k = 0; k < dim(); ++k) {
    const auto& p = factors_[static_cast<std::size_t>(k)];
    const double r = inner_radius(box, k, p.center());
    double t;
    if (p.kind() == ProfileKind::Indicator)
      t = (box.lower()[k] <= p.center() + p.lo() && box.upper()[k] >= p.center() + p.hi()) ? 0.0 : p.l1_norm();
    else
      t = r < 0.0 ? p.l1_norm() : p.tail_integral(r);
    total += t * others(l1, static_cast<std::size_t>(k));
  }
  return std::abs(amplitude_) * total;
}

double WeightFunction::sup_outside(const Box& box) const {
  if (factors_.empty()) return 0.0;
  std::vector<double> sups;
  for (const auto& p : factors_) sups.push_back(p.sup_norm());
  double best = 0.0;
  for (int k = 0; k < dim(); ++k) {
    const auto& p = factors_[static_cast<std::size_t>(k)];
    const double r = inner_radius(box, k, p.center());
    const double s = r < 0.0 ? p.sup_norm() : p.sup_beyond(r);
    best = std::max(best, s * others(sups, static_cast<std::size_t>(k)));
  }
  return std::abs(amplitude_) * best;
}

double WeightFunction::fourier_sup_outside(const Box& box) const {
  if (factors_.empty()) return 0.0;
  std::vector<double> sups;
  for (const auto& p : factors_) sups.push_back(p.fourier_sup_beyond(0.0));
  double best = 0.0;
  for (int k = 0; k < dim(); ++k) {
    const auto& p = factors_[static_cast<std::size_t>(k)];
    const double r = inner_radius(box, k, -p.modulation());
    const double s = r < 0.0 ? sups[static_cast<std::size_t>(k)] : p.fourier_sup_beyond(r);
    best = std::max(best, s * others(sups, static_cast<std::size_t>(k)));
  }
  return std::abs(amplitude_) * best;
}

WeightFunction WeightFunction::autocorrelation() const {
  std::vector<Profile> out;
  for (const auto& p : factors_) {
    auto a = p.autocorrelation();
    if (!a) throw UnsupportedWeightError("no closed form for the autocorrelation of " + p.name());
    out.push_back(*a);
  }
  return WeightFunction(std::move(out), std::norm(amplitude_));
}

// ---------------------------------------------------------------------------

WeightedComb MaterializedModelSet::lifted() const {
  std::vector<Vec> pts;
  pts.reserve(points.size());
  for (const auto& p : points) {
    Vec z(p.x.size() + p.y.size());
    z << p.x, p.y;
    pts.push_back(std::move(z));
  }
  return WeightedComb(std::move(pts), weights, comb.window().product(cutoff));
}

MaterializedModelSet materialize(const WeightedModelSet& ms, const Box& physical_box, double tail_eps,
                                 std::uint64_t cap) {
  if (ms.weight.dim() != ms.scheme.internal_dim())
    throw ParameterError("weight dimension does not match the internal space");
  if (physical_box.dim() != ms.scheme.physical_dim())
    throw ParameterError("physical box dimension does not match the scheme");
  MaterializedModelSet out;
  out.cutoff = ms.weight.cutoff_box(tail_eps);
  auto pts = enumerate_points(ms.scheme, physical_box, out.cutoff, cap);
  std::vector<Vec> xs;
  for (auto& p : pts) {
    const cplx w = ms.weight(p.y);
    if (w == cplx(0.0)) continue;
    xs.push_back(p.x);
    out.weights.push_back(w);
    out.points.push_back(std::move(p));
  }
  out.comb = WeightedComb(std::move(xs), out.weights, physical_box);
  out.dropped_mass_density = ms.scheme.density() * ms.weight.tail_mass_outside(out.cutoff);
  return out;
}

const Peak* PeakList::find(const Vec& frequency, double tol) const {
  for (const auto& p : peaks)
    if (max_abs_diff(p.frequency, frequency) <= tol) return &p;
  return nullptr;
}

PeakList analytic_diffraction(const WeightedModelSet& ms, const Box& freq_box, double amp_eps, bool allow_non_w0) {
  if (!(amp_eps > 0.0)) throw ParameterError("intensity threshold must be positive");
  if (!ms.weight.in_w0() && !allow_non_w0)
    throw UnsupportedWeightError("weight " + ms.weight.describe() +
                                 " is not in W0; its transform is only available with the non-W0 opt-in");
  const double dens = ms.scheme.density();
  const CutProjectScheme dual = ms.scheme.dual();
  const Box eta_box = ms.weight.fourier_cutoff_box(std::sqrt(amp_eps) / dens);
  PeakList out;
  out.kind = PeakKind::Intensities;
  for (const auto& p : enumerate_points(dual, freq_box, eta_box)) {
    const cplx a = dens * ms.weight.inverse_fourier(p.y);
    const double I = std::norm(a);
    if (I < amp_eps) continue;
    out.peaks.push_back(Peak{p.x, a, I, p.y});
  }
  std::sort(out.peaks.begin(), out.peaks.end(),
            [](const Peak& a, const Peak& b) { return lex_less(a.frequency, b.frequency); });
  for (std::size_t i = 0; i < out.peaks.size(); ++i)
    for (std::size_t j = i + 1; j < out.peaks.size(); ++j) {
      if (out.peaks[j].frequency[0] - out.peaks[i].frequency[0] > kMergeTolerance) break;
      if (max_abs_diff(out.peaks[i].frequency, out.peaks[j].frequency) <= kMergeTolerance) ++out.flagged_collisions;
    }
  return out;
}

WeightedModelSet analytic_autocorrelation(const WeightedModelSet& ms) {
  return WeightedModelSet{ms.scheme, ms.weight.autocorrelation().scaled(ms.scheme.density())};
}

}  // namespace qcdiff
