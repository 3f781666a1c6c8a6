#include "qcdiff/diffraction.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

namespace qcdiff {

// ---------------------------------------------------------------------------
// van Hove sequences

VanHoveSequence::VanHoveSequence(int dim, std::vector<double> half_widths)
    : dim_(dim), half_widths_(std::move(half_widths)) {
  if (dim_ < 1) throw ParameterError("van Hove sequence needs dimension >= 1");
  if (half_widths_.empty()) throw ParameterError("van Hove sequence needs at least one stage");
  for (std::size_t i = 0; i < half_widths_.size(); ++i) {
    if (!(half_widths_[i] > 0.0) || !std::isfinite(half_widths_[i]))
      throw ParameterError("van Hove half widths must be positive");
    if (i > 0 && !(half_widths_[i] > half_widths_[i - 1]))
      throw ParameterError("van Hove half widths must increase strictly");
  }
}

VanHoveSequence VanHoveSequence::arithmetic(int dim, double l0, int max_n) {
  if (max_n < 1) throw ParameterError("max_n must be >= 1");
  std::vector<double> l;
  for (int n = 1; n <= max_n; ++n) l.push_back(n * l0);
  return VanHoveSequence(dim, std::move(l));
}

VanHoveSequence VanHoveSequence::geometric(int dim, double l0, double ratio, int max_n) {
  if (max_n < 1) throw ParameterError("max_n must be >= 1");
  if (!(ratio > 1.0)) throw ParameterError("geometric growth ratio must exceed 1");
  std::vector<double> l;
  for (int n = 1; n <= max_n; ++n) l.push_back(l0 * std::pow(ratio, n));
  return VanHoveSequence(dim, std::move(l));
}

double VanHoveSequence::half_width(int n) const {
  if (n < 1 || n > max_n()) throw ParameterError("van Hove index out of range");
  return half_widths_[static_cast<std::size_t>(n - 1)];
}

Box VanHoveSequence::box(int n) const { return Box::cube(dim_, half_width(n)); }

Box VanHoveSequence::box(int n, const Vec& shift) const { return box(n).translated(shift); }

double VanHoveSequence::boundary_ratio(int n, const Box& k) const {
  if (k.dim() != dim_) throw ParameterError("K has the wrong dimension");
  const double l = half_width(n);
  double outer = 1.0, inner = 1.0, vol = 1.0;
  for (int i = 0; i < dim_; ++i) {
    const double r = std::abs(k.center()[i]) + k.half_widths()[i];
    outer *= 2.0 * l + 2.0 * r;
    inner *= std::max(0.0, 2.0 * l - 2.0 * r);
    vol *= 2.0 * l;
  }
  return (outer - inner) / vol;
}

// ---------------------------------------------------------------------------
// Fourier-Bohr coefficients

namespace {

cplx character(const Vec& chi, const Vec& p) {
  double t = chi.dot(p);
  t -= std::round(t);
  return std::exp(cplx(0.0, -kTwoPi * t));
}

void require_window(const WeightedComb& omega, const Box& a) {
  if (!omega.window().contains(a))
    throw GeometryError("comb window does not cover the averaging region");
}

}  // namespace

std::vector<FourierBohrSeries> fourier_bohr(const WeightedComb& omega, const std::vector<Vec>& chis,
                                            const VanHoveSequence& seq, const Vec& shift) {
  if (omega.dim() != seq.dim() || shift.size() != seq.dim()) throw ParameterError("dimension mismatch");
  for (const auto& c : chis)
    if (c.size() != seq.dim()) throw ParameterError("frequency has the wrong dimension");
  const int nmax = seq.max_n();
  require_window(omega, seq.box(nmax, shift));

  std::vector<std::vector<CompensatedSum<cplx>>> bucket(static_cast<std::size_t>(nmax),
                                                        std::vector<CompensatedSum<cplx>>(chis.size()));
  const auto& pts = omega.points();
  const auto& w = omega.weights();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!seq.box(nmax, shift).contains(pts[i])) continue;
    int lo = 1, hi = nmax;  // smallest n with p in A_n
    while (lo < hi) {
      const int mid = (lo + hi) / 2;
      if (seq.box(mid, shift).contains(pts[i]))
        hi = mid;
      else
        lo = mid + 1;
    }
    auto& b = bucket[static_cast<std::size_t>(lo - 1)];
    for (std::size_t c = 0; c < chis.size(); ++c) b[c] += w[i] * character(chis[c], pts[i]);
  }

  std::vector<FourierBohrSeries> out(chis.size());
  for (std::size_t c = 0; c < chis.size(); ++c) {
    auto& s = out[c];
    s.chi = chis[c];
    CompensatedSum<cplx> running;
    for (int n = 1; n <= nmax; ++n) {
      running += bucket[static_cast<std::size_t>(n - 1)][c].value();
      s.half_widths.push_back(seq.half_width(n));
      s.values.push_back(running.value() / seq.box(n).volume());
    }
    s.extrapolated = s.values.back();
    s.error_bar = nmax > 1 ? std::abs(s.values[static_cast<std::size_t>(nmax - 1)] -
                                      s.values[static_cast<std::size_t>(nmax - 2)])
                           : std::numeric_limits<double>::infinity();
  }
  return out;
}

FourierBohrSeries fourier_bohr(const WeightedComb& omega, const Vec& chi, const VanHoveSequence& seq) {
  return fourier_bohr(omega, std::vector<Vec>{chi}, seq, Vec::Zero(seq.dim())).front();
}

UniformityReport translate_uniformity_check(const WeightedComb& omega, const Vec& chi, const VanHoveSequence& seq,
                                            const std::vector<Vec>& shifts) {
  UniformityReport rep;
  rep.shifts = shifts;
  const auto base = fourier_bohr(omega, std::vector<Vec>{chi}, seq, Vec::Zero(seq.dim())).front();
  rep.deviation.assign(static_cast<std::size_t>(seq.max_n()), 0.0);
  for (const auto& t : shifts) {
    rep.series.push_back(fourier_bohr(omega, std::vector<Vec>{chi}, seq, t).front());
    const auto& s = rep.series.back();
    for (std::size_t n = 0; n < s.values.size(); ++n)
      rep.deviation[n] = std::max(rep.deviation[n], std::abs(s.values[n] - base.values[n]));
  }
  rep.max_deviation = rep.deviation.back();
  return rep;
}

// ---------------------------------------------------------------------------
// empirical diffraction

double TaperRule::radius(double half_width) const {
  return std::max(1.0, coefficient * std::pow(half_width, exponent));
}

double tapered_transform(const WeightedComb& gamma, const Vec& chi, double taper_radius) {
  if (!(taper_radius > 0.0)) throw ParameterError("taper radius must be positive");
  CompensatedSum<cplx> s;
  const auto& pts = gamma.points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double f = 1.0;
    for (int k = 0; k < gamma.dim() && f > 0.0; ++k) f *= std::max(0.0, 1.0 - std::abs(pts[i][k]) / taper_radius);
    if (f > 0.0) s += f * gamma.weights()[i] * character(chi, pts[i]);
  }
  return s.value().real() / std::pow(taper_radius, gamma.dim());
}

EmpiricalDiffraction empirical_diffraction(const WeightedComb& omega, const VanHoveSequence& seq,
                                           const std::vector<Vec>& freqs, const TaperRule& taper) {
  EmpiricalDiffraction out;
  out.frequencies = freqs;
  const auto fb = fourier_bohr(omega, freqs, seq, Vec::Zero(seq.dim()));
  for (int n = 1; n <= seq.max_n(); ++n) {
    EmpiricalStage st;
    st.n = n;
    st.half_width = seq.half_width(n);
    st.taper_radius = taper.radius(st.half_width);
    const Box a = seq.box(n);
    const auto gamma = autocorrelation_finite(restrict(omega, a), a.volume(), st.taper_radius);
    for (std::size_t c = 0; c < freqs.size(); ++c) {
      st.route_a.push_back(std::norm(fb[c].values[static_cast<std::size_t>(n - 1)]));
      st.route_b.push_back(tapered_transform(gamma, freqs[c], st.taper_radius));
      st.max_gap = std::max(st.max_gap, std::abs(st.route_a.back() - st.route_b.back()));
    }
    out.stages.push_back(std::move(st));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poisson summation

namespace {

// Bound on sum over lattice points outside the cube of half width r of
// sup|F|, where F(s) bounds |F| outside the cube of half width s. Lattice
// point counts in a cube are bracketed through the fundamental
// parallelepiped's half extents rho.
template <class Sup>
double lattice_tail(const Mat& basis, double dens, double r, Sup&& sup_outside) {
  const int n = static_cast<int>(basis.rows());
  std::vector<double> rho(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) rho[static_cast<std::size_t>(k)] = 0.5 * basis.row(k).cwiseAbs().sum();
  auto count_upper = [&](double s) {
    double c = dens;
    for (double p : rho) c *= 2.0 * s + 2.0 * p;
    return c;
  };
  auto count_lower = [&](double s) {
    double c = dens;
    for (double p : rho) c *= std::max(0.0, 2.0 * s - 2.0 * p);
    return c;
  };
  const double step = 0.25;
  double total = 0.0;
  for (int j = 0; j < 200000; ++j) {
    const double s0 = r + j * step, s1 = s0 + step;
    const double term = (count_upper(s1) - count_lower(s0)) * sup_outside(s0);
    total += term;
    if (j > 8 && term <= 1e-30 * total) return total;
    if (term == 0.0 && j > 8) return total;
  }
  return std::numeric_limits<double>::infinity();
}

// |term| times a conditioning allowance for exp-type factors
double term_roundoff(cplx term) {
  const double a = std::abs(term);
  if (a == 0.0) return 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  return eps * a * (8.0 + 2.0 * std::abs(std::log(a)));
}

}  // namespace

PsfReport psf_verify(const CutProjectScheme& scheme, const WeightFunction& g, const WeightFunction& h, double radius) {
  const int d = scheme.physical_dim(), m = scheme.internal_dim();
  if (g.dim() != d || h.dim() != m) throw ParameterError("test functions do not match the scheme dimensions");
  if (!g.in_w0() || !h.in_w0()) throw UnsupportedWeightError("Poisson summation needs W0 test functions");
  if (!(radius > 0.0)) throw ParameterError("truncation radius must be positive");

  PsfReport rep;
  rep.radius = radius;
  const double dens = scheme.density();
  const Box pbox = Box::cube(d, radius);
  const Box ibox = m > 0 ? Box::cube(m, radius) : Box::empty_space();

  CompensatedSum<cplx> lhs, rhs;
  double round = 0.0;
  for (const auto& p : enumerate_points(scheme, pbox, ibox)) {
    const cplx t = g(p.x) * h(p.y);
    lhs += t;
    round += term_roundoff(t);
    ++rep.lhs_terms;
  }
  const CutProjectScheme dual = scheme.dual();
  for (const auto& p : enumerate_points(dual, pbox, ibox)) {
    const cplx t = dens * g.inverse_fourier(p.x) * h.inverse_fourier(p.y);
    rhs += t;
    round += term_roundoff(t);
    ++rep.rhs_terms;
  }
  rep.lhs = lhs.value();
  rep.rhs = rhs.value();
  rep.residual = std::abs(rep.lhs - rep.rhs);
  rep.roundoff_bound = round;

  const double gs = g.sup_norm(), hs = h.sup_norm();
  const double gf = g.fourier_sup_norm(), hf = h.fourier_sup_norm();
  const double tail_l = lattice_tail(scheme.basis(), dens, radius, [&](double s) {
    const double a = g.sup_outside(Box::cube(d, s)) * hs;
    const double b = m > 0 ? gs * h.sup_outside(Box::cube(m, s)) : 0.0;
    return std::max(a, b);
  });
  const double tail_r = dens * lattice_tail(dual.basis(), dual.density(), radius, [&](double s) {
    const double a = g.fourier_sup_outside(Box::cube(d, s)) * hf;
    const double b = m > 0 ? gf * h.fourier_sup_outside(Box::cube(m, s)) : 0.0;
    return std::max(a, b);
  });
  rep.tail_bound = tail_l + tail_r;
  rep.pass = rep.residual <= 10.0 * (rep.tail_bound + rep.roundoff_bound);
  return rep;
}

// ---------------------------------------------------------------------------
// density formula

DensityReport density_formula_check(const WeightedModelSet& ms, const VanHoveSequence& seq,
                                    const std::vector<Vec>& shifts, double tail_eps) {
  if (shifts.empty()) throw ParameterError("density check needs at least one shift");
  const int d = seq.dim();
  double reach = seq.half_width(seq.max_n());
  for (const auto& t : shifts) {
    if (t.size() != d) throw ParameterError("shift has the wrong dimension");
    reach = std::max(reach, seq.half_width(seq.max_n()) + t.cwiseAbs().maxCoeff());
  }
  const auto mat = materialize(ms, Box::cube(d, reach + 1.0), tail_eps);

  DensityReport rep;
  rep.target = (ms.scheme.density() * ms.weight.integral()).real();
  rep.half_widths = seq.half_widths();
  rep.shifts = shifts;
  rep.dropped_mass_density = mat.dropped_mass_density;
  const Vec zero = Vec::Zero(d);
  for (const auto& t : shifts) {
    const auto s = fourier_bohr(mat.comb, std::vector<Vec>{zero}, seq, t).front();
    std::vector<double> r;
    for (const auto& v : s.values) r.push_back(v.real());
    rep.ratios.push_back(std::move(r));
  }
  const auto nn = static_cast<std::size_t>(seq.max_n());
  rep.residual.assign(nn, 0.0);
  rep.shift_deviation.assign(nn, 0.0);
  for (std::size_t k = 0; k < shifts.size(); ++k)
    for (std::size_t n = 0; n < nn; ++n) {
      rep.residual[n] = std::max(rep.residual[n], std::abs(rep.ratios[k][n] - rep.target));
      rep.shift_deviation[n] = std::max(rep.shift_deviation[n], std::abs(rep.ratios[k][n] - rep.ratios[0][n]));
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Wiener diagram

std::vector<Vec> off_peak_frequencies(const PeakList& reference, const Box& box, std::size_t count, std::uint64_t seed,
                                      const ExclusionRule& rule) {
  std::vector<const Peak*> strong;
  for (const auto& p : reference.peaks)
    if (std::abs(p.amplitude) >= rule.amplitude_floor) strong.push_back(&p);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Vec> out;
  for (std::size_t attempts = 0; out.size() < count; ++attempts) {
    if (attempts > 1000000) throw GeometryError("no admissible off-peak frequencies in the box");
    Vec chi = box.center();
    for (int k = 0; k < box.dim(); ++k) chi[k] += box.half_widths()[k] * u(rng);
    bool ok = true;
    for (const Peak* p : strong) {
      const double r = std::max(rule.min_radius, rule.amplitude_factor * std::abs(p->amplitude));
      if (max_abs_diff(p->frequency, chi) < r) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(std::move(chi));
  }
  return out;
}

namespace {

struct CoordsLess {
  bool operator()(const std::vector<long long>& a, const std::vector<long long>& b) const { return a < b; }
};

std::vector<long long> lattice_coords(const Mat& inverse_basis, const Vec& z) {
  const Vec c = inverse_basis * z;
  std::vector<long long> k(static_cast<std::size_t>(c.size()));
  for (Eigen::Index i = 0; i < c.size(); ++i) k[static_cast<std::size_t>(i)] = std::llround(c[i]);
  return k;
}

}  // namespace

WienerDiagramReport wiener_diagram_report(const WeightedModelSet& ms, double half_width,
                                          const WienerDiagramOptions& opt) {
  const int d = ms.scheme.physical_dim(), m = ms.scheme.internal_dim();
  WienerDiagramReport rep;
  rep.half_width = half_width;
  const Box a = Box::cube(d, half_width);
  const double vol = a.volume();
  const auto mat = materialize(ms, a, opt.tail_eps);
  rep.points = mat.comb.size();

  // autocorrelation corner, compared on lattice coordinates of the differences
  const WeightFunction analytic = analytic_autocorrelation(ms).weight;
  double internal_reach = 0.0;
  if (m > 0)
    internal_reach = 2.0 * std::max(mat.cutoff.lower().cwiseAbs().maxCoeff(), mat.cutoff.upper().cwiseAbs().maxCoeff());
  const double cutoff = std::max(opt.autocorr_cutoff, internal_reach) * (1.0 + 1e-12) + 1e-9;
  const auto gamma = autocorrelation_finite(mat.lifted(), vol, cutoff);
  const Mat inv = ms.scheme.dual_basis().transpose();
  std::map<std::vector<long long>, cplx, CoordsLess> empirical;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    const Vec& z = gamma.points()[i];
    if (z.head(d).cwiseAbs().maxCoeff() > opt.autocorr_cutoff) continue;
    empirical[lattice_coords(inv, z)] += gamma.weights()[i];
    rep.autocorr_gap = std::max(rep.autocorr_gap, std::abs(gamma.weights()[i] - analytic(z.tail(m))));
  }
  std::size_t coefficients = empirical.size();
  const Box floor_box = analytic.cutoff_box(opt.autocorr_floor);
  for (const auto& p : enumerate_points(ms.scheme, Box::cube(d, opt.autocorr_cutoff), floor_box)) {
    if (empirical.count(p.coords)) continue;
    ++coefficients;
    rep.autocorr_gap = std::max(rep.autocorr_gap, std::abs(analytic(p.y)));
  }
  rep.autocorr_coefficients = coefficients;

  // diffraction corner
  const PeakList peaks = analytic_diffraction(ms, opt.freq_box, opt.peak_eps, opt.allow_non_w0);
  rep.peaks = peaks.peaks.size();
  std::vector<Vec> chis;
  for (const auto& p : peaks.peaks) chis.push_back(p.frequency);
  const VanHoveSequence single(d, {half_width});
  const double taper = opt.taper.radius(half_width);
  const auto gamma_phys = autocorrelation_finite(mat.comb, vol, taper);
  if (!chis.empty()) {
    const auto fb = fourier_bohr(mat.comb, chis, single, Vec::Zero(d));
    for (std::size_t i = 0; i < chis.size(); ++i) {
      const cplx ai = fb[i].values.back();
      rep.amplitude_gap = std::max(rep.amplitude_gap, std::abs(ai - peaks.peaks[i].amplitude));
      rep.peak_gap = std::max(rep.peak_gap, std::abs(std::norm(ai) - peaks.peaks[i].intensity));
      rep.route_gap = std::max(rep.route_gap, std::abs(std::norm(ai) - tapered_transform(gamma_phys, chis[i], taper)));
    }
  }

  // off-peak control
  const double floor = opt.exclusion.amplitude_floor;
  const PeakList reference =
      analytic_diffraction(ms, opt.freq_box.grown(Box::cube(d, 1.0)), floor * floor, opt.allow_non_w0);
  rep.off_peak_frequencies = off_peak_frequencies(reference, opt.freq_box, opt.off_peak_count, opt.seed, opt.exclusion);
  if (!rep.off_peak_frequencies.empty()) {
    const auto fb = fourier_bohr(mat.comb, rep.off_peak_frequencies, single, Vec::Zero(d));
    for (const auto& s : fb) rep.off_peak_max = std::max(rep.off_peak_max, std::norm(s.values.back()));
  }

  rep.autocorr_ok = rep.autocorr_gap <= opt.autocorr_tol;
  rep.peak_ok = rep.peak_gap <= opt.peak_tol;
  rep.off_peak_ok = rep.off_peak_max <= opt.off_peak_tol;
  return rep;
}

CommutativityReport comb_commutativity(const WeightedComb& omega, double half_width, const Vec& chi,
                                       const TaperRule& taper) {
  const int d = omega.dim();
  CommutativityReport rep;
  rep.chi = chi;
  rep.half_width = half_width;
  rep.taper_radius = taper.radius(half_width);
  const Box a = Box::cube(d, half_width);
  require_window(omega, a);
  const auto local = restrict(omega, a);
  rep.amplitude = fourier_bohr(local, std::vector<Vec>{chi}, VanHoveSequence(d, {half_width}), Vec::Zero(d))
                      .front()
                      .values.back();
  rep.route_a = std::norm(rep.amplitude);
  const auto gamma = autocorrelation_finite(local, a.volume(), rep.taper_radius);
  rep.route_b = tapered_transform(gamma, chi, rep.taper_radius);
  for (std::size_t i = 0; i < gamma.size(); ++i)
    if (gamma.points()[i].cwiseAbs().maxCoeff() == 0.0) rep.gamma_at_zero = gamma.weights()[i].real();
  rep.gap = std::abs(rep.route_a - rep.route_b);
  return rep;
}

// ---------------------------------------------------------------------------
// positive definiteness

std::vector<TestBump> bump_battery(int dim, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<TestBump> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Profile> factors;
    for (int k = 0; k < dim; ++k) {
      const double c = 4.0 * u(rng) - 2.0;
      switch (i % 3) {
        case 0: factors.push_back(Profile::gaussian(0.3 + 1.7 * u(rng)).shifted(c)); break;
        case 1: factors.push_back(Profile::gaussian(0.3 + 1.7 * u(rng)).shifted(c).modulated(2.0 * u(rng) - 1.0)); break;
        default: factors.push_back(Profile::bspline(1 + static_cast<int>(i % 3), 0.5 + 1.5 * u(rng)).shifted(c)); break;
      }
    }
    WeightFunction f(std::move(factors));
    out.push_back(TestBump{f, f.autocorrelation()});
  }
  return out;
}

bool hermitian_exact(const WeightedComb& gamma) {
  const auto& p = gamma.points();
  const auto& w = gamma.weights();
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = n - 1 - i;
    for (Eigen::Index k = 0; k < p[i].size(); ++k)
      if (p[i][k] != -p[j][k]) return false;
    if (w[i] != std::conj(w[j])) return false;
  }
  return true;
}

PositiveDefinitenessReport positive_definiteness(const WeightedComb& gamma, const std::vector<TestBump>& battery) {
  PositiveDefinitenessReport rep;
  rep.hermitian_exact = hermitian_exact(gamma);
  rep.min_real = std::numeric_limits<double>::infinity();
  for (const auto& b : battery) {
    if (b.autocorrelation.dim() != gamma.dim()) throw ParameterError("test bump has the wrong dimension");
    CompensatedSum<cplx> s;
    double scale = 0.0;
    for (std::size_t i = 0; i < gamma.size(); ++i) {
      const cplx t = gamma.weights()[i] * b.autocorrelation(gamma.points()[i]);
      s += t;
      scale += std::abs(t);
    }
    ++rep.tests;
    if (scale == 0.0) {
      rep.min_real = std::min(rep.min_real, 0.0);
      continue;
    }
    rep.min_real = std::min(rep.min_real, s.value().real() / scale);
    rep.max_imag = std::max(rep.max_imag, std::abs(s.value().imag()) / scale);
  }
  if (rep.tests == 0) rep.min_real = 0.0;
  return rep;
}

}  // namespace qcdiff
