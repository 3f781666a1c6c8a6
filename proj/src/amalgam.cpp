#include "qcdiff/amalgam.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace qcdiff {

// ---------------------------------------------------------------------------
// Grid

Grid Grid::uniform(double lo, double hi, int n) {
  if (n < 2 || !(hi > lo)) throw ParameterError("grid needs lo < hi and at least two nodes");
  return Grid{Vec::Constant(1, lo), Vec::Constant(1, (hi - lo) / (n - 1)), {n}};
}

Grid Grid::over(const Box& box, double step) {
  if (!(step > 0.0)) throw ParameterError("grid step must be positive");
  Grid g{box.lower(), Vec::Constant(box.dim(), step), {}};
  for (int k = 0; k < box.dim(); ++k)
    g.count.push_back(static_cast<int>(std::floor(2.0 * box.half_widths()[k] / step + 1e-9)) + 1);
  return g;
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int c : count) n *= static_cast<std::size_t>(c);
  return n;
}

Box Grid::box() const {
  Vec hi(dim());
  for (int k = 0; k < dim(); ++k) hi[k] = origin[k] + step[k] * (count[k] - 1);
  return Box::from_bounds(origin, hi);
}

Vec Grid::node(std::size_t flat) const {
  Vec x(dim());
  for (int k = dim() - 1; k >= 0; --k) {
    const auto c = static_cast<std::size_t>(count[k]);
    x[k] = origin[k] + step[k] * static_cast<double>(flat % c);
    flat /= c;
  }
  return x;
}

// ---------------------------------------------------------------------------
// SampledFunction

SampledFunction::SampledFunction(Grid grid, std::vector<cplx> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.dim() == 0) throw ParameterError("sampled function needs at least one dimension");
  for (int k = 0; k < grid_.dim(); ++k)
    if (grid_.count[k] < 2 || !(grid_.step[k] > 0.0)) throw ParameterError("grid needs >= 2 nodes and a positive step");
  if (values_.size() != grid_.size()) throw ParameterError("sample count does not match the grid");
  for (const auto& v : values_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ParameterError("samples must be finite");
}

SampledFunction SampledFunction::sample(std::vector<Profile> factors, Grid grid) {
  if (static_cast<int>(factors.size()) != grid.dim()) throw ParameterError("one profile per grid dimension");
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec x = grid.node(i);
    cplx p = 1.0;
    for (std::size_t k = 0; k < factors.size(); ++k) p *= factors[k](x[static_cast<Eigen::Index>(k)]);
    v[i] = p;
  }
  SampledFunction f(std::move(grid), std::move(v));
  f.closed_ = std::move(factors);
  return f;
}

SampledFunction SampledFunction::zero(Grid grid) {
  std::vector<cplx> v(grid.size(), cplx(0.0));
  return SampledFunction(std::move(grid), std::move(v));
}

cplx SampledFunction::operator()(const Vec& x) const {
  if (closed_) {
    cplx p = 1.0;
    for (std::size_t k = 0; k < closed_->size(); ++k) p *= (*closed_)[k](x[static_cast<Eigen::Index>(k)]);
    return p;
  }
  return interpolate(x);
}

cplx SampledFunction::interpolate(const Vec& x) const {
  const int d = dim();
  std::array<std::size_t, 3> base{};
  std::array<double, 3> frac{};
  if (d > 3) throw ParameterError("interpolation supports d <= 3");
  for (int k = 0; k < d; ++k) {
    const double t = (x[k] - grid_.origin[k]) / grid_.step[k];
    const double n1 = static_cast<double>(grid_.count[k] - 1);
    if (t < -1e-12 || t > n1 + 1e-12) return 0.0;
    const double tc = std::clamp(t, 0.0, n1);
    auto i = static_cast<std::size_t>(std::floor(tc));
    if (i >= static_cast<std::size_t>(grid_.count[k] - 1)) i = static_cast<std::size_t>(grid_.count[k] - 2);
    base[k] = i;
    frac[k] = tc - static_cast<double>(i);
  }
  cplx acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int k = 0; k < d; ++k) {
      const int bit = (corner >> k) & 1;
      w *= bit ? frac[k] : 1.0 - frac[k];
      flat = flat * static_cast<std::size_t>(grid_.count[k]) + base[k] + static_cast<std::size_t>(bit);
    }
    if (w != 0.0) acc += w * values_[flat];
  }
  return acc;
}

SampledFunction SampledFunction::translated(const Vec& a) const {
  SampledFunction f = *this;
  f.grid_.origin += a;
  if (closed_)
    for (std::size_t k = 0; k < closed_->size(); ++k)
      (*f.closed_)[k] = (*closed_)[k].shifted(a[static_cast<Eigen::Index>(k)]);
  return f;
}

SampledFunction SampledFunction::scaled(cplx a) const {
  SampledFunction f = *this;
  for (auto& v : f.values_) v *= a;
  if (closed_ && !closed_->empty()) (*f.closed_)[0] = (*closed_)[0].times(a);
  return f;
}

SampledFunction SampledFunction::conj() const {
  SampledFunction f = *this;
  for (auto& v : f.values_) v = std::conj(v);
  if (closed_)
    for (auto& p : *f.closed_) p = p.conjugated();
  return f;
}

SampledFunction SampledFunction::abs() const {
  std::vector<cplx> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::abs(values_[i]);
  return SampledFunction(grid_, std::move(v));
}

SampledFunction SampledFunction::reflected() const {
  Grid g = grid_;
  for (int k = 0; k < dim(); ++k) g.origin[k] = -(grid_.origin[k] + grid_.step[k] * (grid_.count[k] - 1));
  std::vector<cplx> v(values_.size());
  // flat index of the mirrored node is size-1-flat for a row-major tensor grid
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[values_.size() - 1 - i];
  SampledFunction f(std::move(g), std::move(v));
  if (closed_) {
    std::vector<Profile> r;
    for (const auto& p : *closed_) {
      auto q = p.reflected();
      if (!q) return f;
      r.push_back(*q);
    }
    f.closed_ = std::move(r);
  }
  return f;
}

SampledFunction SampledFunction::modulated(double beta) const {
  if (dim() != 1) throw ParameterError("modulation is one-dimensional");
  SampledFunction f = *this;
  for (std::size_t i = 0; i < values_.size(); ++i)
    f.values_[i] *= std::exp(cplx(0.0, kTwoPi * beta * grid_.node_1d(static_cast<int>(i))));
  if (closed_) (*f.closed_)[0] = (*closed_)[0].modulated(beta);
  return f;
}

SampledFunction SampledFunction::operator+(const SampledFunction& other) const {
  if (other.grid_.count != grid_.count || max_abs_diff(other.grid_.origin, grid_.origin) > 1e-12 ||
      max_abs_diff(other.grid_.step, grid_.step) > 1e-15)
    throw ParameterError("sum of sampled functions needs identical grids");
  std::vector<cplx> v(values_.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = values_[i] + other.values_[i];
  return SampledFunction(grid_, std::move(v));
}

double SampledFunction::sup_norm() const {
  double m = 0.0;
  for (const auto& v : values_) m = std::max(m, std::abs(v));
  return m;
}

SampledFunction SampledFunction::fourier(Grid grid) const {
  if (!closed_) throw UnsupportedWeightError("Fourier transform needs a closed form");
  std::vector<Profile> transformed;
  bool representable = true;
  for (const auto& p : *closed_) {
    auto q = p.fourier_profile();
    if (!q) {
      representable = false;
      break;
    }
    transformed.push_back(*q);
  }
  if (representable) return sample(std::move(transformed), std::move(grid));
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec xi = grid.node(i);
    cplx p = 1.0;
    for (std::size_t k = 0; k < closed_->size(); ++k) p *= (*closed_)[k].fourier(xi[static_cast<Eigen::Index>(k)]);
    v[i] = p;
  }
  return SampledFunction(std::move(grid), std::move(v));
}

bool SampledFunction::consistent() const {
  if (!closed_) return true;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const cplx exact = (*this)(grid_.node(i));
    if (std::abs(exact - values_[i]) > 1e-12 * std::max(1.0, std::abs(exact))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Wiener norms

namespace {

// real roots in (0, 1) of c[0] + c[1] t + c[2] t^2 + c[3] t^3
std::vector<double> roots_in_unit_interval(const std::array<double, 4>& c) {
  const double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3])});
  std::vector<double> out;
  if (scale == 0.0) return out;
  int deg = 3;
  while (deg > 0 && std::abs(c[static_cast<std::size_t>(deg)]) <= 1e-14 * scale) --deg;
  if (deg == 0) return out;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c[static_cast<std::size_t>(deg)];
  const Eigen::VectorXcd ev = companion.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (std::abs(ev[i].imag()) <= 1e-9 && ev[i].real() > 0.0 && ev[i].real() < 1.0) out.push_back(ev[i].real());
  return out;
}

double sup_on_interval_1d(const SampledFunction& f, const BumpFunction& phi, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  const double h = f.grid().step[0] / 4.0;
  const double o = f.grid().origin[0];
  const long long k0 = static_cast<long long>(std::ceil((lo - o) / h));
  const long long k1 = static_cast<long long>(std::floor((hi - o) / h));
  for (long long k = k0; k <= k1; ++k) pts.push_back(o + h * static_cast<double>(k));
  for (double b : phi.kernel()->breakpoints())
    if (b > lo && b < hi) pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  auto g = [&](double x) { return f(x) * phi(x); };
  double best = 0.0;
  cplx g0 = g(pts[0]);
  best = std::abs(g0);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double a = pts[i], b = pts[i + 1];
    const double m = 0.5 * (a + b);
    const cplx gm = g(m), g1 = g(b);
    best = std::max({best, std::abs(gm), std::abs(g1)});
    // g(a + t(b - a)) = g0 + B t + C t^2 on the cell; maximise |g|^2, a quartic
    const cplx c2 = 2.0 * (g1 - 2.0 * gm + g0);
    const cplx c1 = g1 - g0 - c2;
    const std::array<double, 4> deriv{2.0 * std::real(std::conj(g0) * c1),
                                      2.0 * (std::norm(c1) + 2.0 * std::real(std::conj(g0) * c2)),
                                      6.0 * std::real(std::conj(c1) * c2), 4.0 * std::norm(c2)};
    for (double t : roots_in_unit_interval(deriv)) best = std::max(best, std::abs(g(a + t * (b - a))));
    g0 = g1;
  }
  return best;
}

double sup_on_box(const SampledFunction& f, const BumpFunction& phi, const Vec& lo, const Vec& hi) {
  const int d = f.dim();
  std::vector<int> n(d);
  for (int k = 0; k < d; ++k) {
    const double cells = (hi[k] - lo[k]) / (f.grid().step[k] / 4.0);
    n[k] = std::clamp(static_cast<int>(std::ceil(cells)) + 1, 3, 201);
  }
  std::vector<int> idx(d, 0);
  Vec x(d);
  double best = 0.0;
  while (true) {
    for (int k = 0; k < d; ++k) x[k] = lo[k] + (hi[k] - lo[k]) * idx[k] / static_cast<double>(n[k] - 1);
    best = std::max(best, std::abs(f(x) * phi(x)));
    int k = d - 1;
    while (k >= 0) {
      if (++idx[k] < n[k]) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return best;
}

}  // namespace

double wiener_norm(const SampledFunction& f, const Bupu& phi) {
  if (f.dim() != phi.dim()) throw ParameterError("function and BUPU dimensions differ");
  const Box supp = f.support_box();
  const Box allowed = phi.coverage().shrunk(phi.size_u());
  if (!allowed.contains(supp))
    throw GeometryError("function support leaks outside the BUPU coverage eroded by U");
  CompensatedSum<double> total;
  for (const auto& b : phi.functions()) {
    const Box cell = phi.size_u().translated(b.center());
    if (!cell.intersects(supp)) continue;
    const Vec lo = cell.lower().cwiseMax(supp.lower());
    const Vec hi = cell.upper().cwiseMin(supp.upper());
    total += f.dim() == 1 ? sup_on_interval_1d(f, b, lo[0], hi[0]) : sup_on_box(f, b, lo, hi);
  }
  return total.value();
}

NormReport homogeneous_norm(const SampledFunction& f, const Bupu& phi, double step, double radius) {
  if (!(step > 0.0) || !(radius >= 0.0)) throw ParameterError("translate grid needs step > 0 and radius >= 0");
  NormReport rep;
  rep.phi_norm = wiener_norm(f, phi);
  const int d = f.dim();
  const long long n = static_cast<long long>(std::floor(radius / step + 1e-9));
  std::vector<long long> idx(d, -n);
  Vec x(d);
  rep.homogeneous_norm = 0.0;
  while (true) {
    for (int k = 0; k < d; ++k) x[k] = step * static_cast<double>(idx[k]);
    const double v = wiener_norm(f.translated(x), phi);
    ++rep.translate_count;
    const bool tie = std::abs(v - rep.homogeneous_norm) <= 1e-14 * v && std::abs(x[0]) < std::abs(rep.argmax);
    if (v > rep.homogeneous_norm + 1e-14 * v || tie) {
      rep.homogeneous_norm = v;
      rep.argmax = x[0];
    }
    int k = d - 1;
    while (k >= 0) {
      if (++idx[k] <= n) break;
      idx[k] = -n;
      --k;
    }
    if (k < 0) break;
  }
  const auto centers = phi.centers();
  rep.upper_bound = point_family_norm(centers, phi.size_u().difference(phi.size_u())) * phi.norm_m() * rep.phi_norm;
  return rep;
}

SampledFunction random_piecewise_linear(double lo, double hi, int knots, std::uint64_t seed, bool complex_values) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = knots + 2;
  std::vector<cplx> v(static_cast<std::size_t>(n), cplx(0.0));
  for (int i = 1; i + 1 < n; ++i) {
    const double re = u(rng);
    const double im = complex_values ? u(rng) : 0.0;
    v[static_cast<std::size_t>(i)] = cplx(re, im);
  }
  return SampledFunction(Grid::uniform(lo, hi, n), std::move(v));
}

OperatorNormSandwich operator_norm_sandwich(const WeightedComb& mu, const Bupu& phi, std::size_t tests, std::uint64_t seed) {
  OperatorNormSandwich out;
  const auto centers = phi.centers();
  const double mu_u = comb_norm(mu, phi.size_u());
  const double overlap = point_family_norm(centers, phi.size_u().difference(phi.size_u()));
  out.upper = mu_u;
  out.lower = mu_u / (phi.norm_m() * overlap);
  if (mu.empty() || phi.dim() != 1) return out;

  const Box allowed = phi.coverage().shrunk(phi.size_u());
  const double a = allowed.lower()[0], b = allowed.upper()[0];
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> knots(1, 12);
  for (std::size_t t = 0; t < tests; ++t) {
    double lo = a + (b - a) * u01(rng);
    double hi = a + (b - a) * u01(rng);
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 1e-3) hi = std::min(b, lo + 1.0);
    const auto f = random_piecewise_linear(lo, hi, knots(rng), rng(), t % 2 == 1);
    const double nf = wiener_norm(f, phi);
    if (nf == 0.0) continue;
    const double q = std::abs(evaluate(mu, [&](const Vec& x) { return f(x); })) / nf;
    out.max_quotient = std::max(out.max_quotient, q);
    ++out.tests;
    if (q > out.upper * (1.0 + 1e-12)) ++out.violations;
  }
  return out;
}

// ---------------------------------------------------------------------------
// STFT / S0

namespace {

bool effectively_supported(const SampledFunction& f) {
  const double m = f.sup_norm();
  if (m == 0.0) return true;
  const auto& v = f.values();
  return std::abs(v.front()) <= 1e-10 * m && std::abs(v.back()) <= 1e-10 * m;
}

}  // namespace

StftResult stft(const SampledFunction& f, const SampledFunction& g, const Grid& time, const Grid& freq) {
  if (f.dim() != 1 || g.dim() != 1 || time.dim() != 1 || freq.dim() != 1)
    throw ParameterError("the short-time Fourier transform is one-dimensional here");
  if (g.sup_norm() == 0.0) throw ParameterError("STFT window is identically zero");
  if (!effectively_supported(f) || !effectively_supported(g))
    throw ParameterError("function is not effectively supported inside its grid");

  const int ns = f.grid().count[0];
  const double h = f.grid().step[0];
  const int nt = time.count[0];
  const int nf = freq.count[0];

  // drop nodes where f vanishes
  std::vector<int> active;
  for (int j = 0; j < ns; ++j)
    if (f.values()[static_cast<std::size_t>(j)] != cplx(0.0)) active.push_back(j);

  StftResult out{time, freq, Eigen::MatrixXcd::Zero(nt, nf)};
  if (active.empty()) return out;
  const auto na = static_cast<Eigen::Index>(active.size());
  Eigen::MatrixXcd phase(nf, na);
  for (int k = 0; k < nf; ++k) {
    const double xi = freq.node_1d(k);
    for (Eigen::Index a = 0; a < na; ++a) {
      const double s = f.grid().node_1d(active[static_cast<std::size_t>(a)]);
      phase(k, a) = std::exp(cplx(0.0, -kTwoPi * xi * s));
    }
  }
  Eigen::VectorXcd fw(na);
  for (Eigen::Index a = 0; a < na; ++a) {
    const int j = active[static_cast<std::size_t>(a)];
    const double w = (j == 0 || j == ns - 1) ? 0.5 * h : h;
    fw[a] = w * f.values()[static_cast<std::size_t>(j)];
  }
  Eigen::VectorXcd p(na);
  for (int i = 0; i < nt; ++i) {
    const double t = time.node_1d(i);
    for (Eigen::Index a = 0; a < na; ++a) {
      const double s = f.grid().node_1d(active[static_cast<std::size_t>(a)]);
      p[a] = fw[a] * std::conj(g(s - t));
    }
    out.values.row(i) = (phase * p).transpose();
  }
  return out;
}

S0Report s0_norm(const SampledFunction& f, const SampledFunction& g, const Grid& time, const Grid& freq,
                 double tolerance, double max_boundary_ratio) {
  const auto v = stft(f, g, time, freq);
  const int nt = time.count[0], nf = freq.count[0];
  const double ht = time.step[0], hf = freq.step[0];
  auto trap = [](int i, int n) { return (i == 0 || i == n - 1) ? 0.5 : 1.0; };

  CompensatedSum<double> total, band, coarse;
  const int bt = std::max(1, nt / 10), bf = std::max(1, nf / 10);
  const int nt2 = (nt - 1) / 2 + 1, nf2 = (nf - 1) / 2 + 1;
  for (int i = 0; i < nt; ++i) {
    for (int k = 0; k < nf; ++k) {
      const double a = std::abs(v.values(i, k));
      const double w = trap(i, nt) * trap(k, nf) * ht * hf;
      total += w * a;
      if (i < bt || i >= nt - bt || k < bf || k >= nf - bf) band += w * a;
      if (i % 2 == 0 && k % 2 == 0) coarse += trap(i / 2, nt2) * trap(k / 2, nf2) * 4.0 * ht * hf * a;
    }
  }
  S0Report rep;
  rep.value = total.value();
  rep.coarse_value = coarse.value();
  rep.richardson_delta = std::abs(rep.value - rep.coarse_value);
  rep.boundary_mass_ratio = rep.value > 0.0 ? band.value() / rep.value : 0.0;
  rep.accepted = rep.richardson_delta <= tolerance * std::max(rep.value, 1e-300) || rep.value == 0.0;
  if (rep.boundary_mass_ratio > max_boundary_ratio)
    throw TruncationError("STFT mass near the grid boundary is too large", rep.boundary_mass_ratio);
  return rep;
}

SampledFunction default_window() { return SampledFunction::sample(Profile::gaussian(1.0), Grid::uniform(-12.0, 12.0, 769)); }

}  // namespace qcdiff
