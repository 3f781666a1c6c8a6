#include "qcdiff/bupu.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace qcdiff {

namespace {

class TriangleKernel final : public BumpKernel {
 public:
  TriangleKernel(double c, double r, double h) : c_(c), r_(r), h_(h) {}
  double operator()(const Vec& x) const override { return h_ * std::max(0.0, 1.0 - std::abs(x[0] - c_) / r_); }
  std::vector<double> breakpoints() const override { return {c_ - r_, c_, c_ + r_}; }

 private:
  double c_, r_, h_;
};

/// CDF of the area-one triangle on [-w, w].
double triangle_cdf(double s, double w) {
  if (s <= -w) return 0.0;
  if (s >= w) return 1.0;
  if (s <= 0.0) return (s + w) * (s + w) / (2.0 * w * w);
  return 1.0 - (w - s) * (w - s) / (2.0 * w * w);
}

class SmoothedBoxKernel final : public BumpKernel {
 public:
  SmoothedBoxKernel(double c, double half_cell, double w) : c_(c), a_(half_cell), w_(w) {}
  double operator()(const Vec& x) const override {
    const double s = x[0] - c_;
    return triangle_cdf(s + a_, w_) - triangle_cdf(s - a_, w_);
  }
  std::vector<double> breakpoints() const override {
    return {c_ - a_ - w_, c_ - a_, c_ - a_ + w_, c_ + a_ - w_, c_ + a_, c_ + a_ + w_};
  }

 private:
  double c_, a_, w_;
};

class TableKernel final : public BumpKernel {
 public:
  TableKernel(double origin, double step, std::vector<double> v) : o_(origin), h_(step), v_(std::move(v)) {}
  double operator()(const Vec& x) const override {
    const double t = (x[0] - o_) / h_;
    if (t < 0.0 || t > static_cast<double>(v_.size() - 1)) return 0.0;
    const auto i = std::min(static_cast<std::size_t>(t), v_.size() - 2);
    const double f = t - static_cast<double>(i);
    return (1.0 - f) * v_[i] + f * v_[i + 1];
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> b;
    for (std::size_t i = 0; i < v_.size(); ++i) b.push_back(o_ + h_ * static_cast<double>(i));
    return b;
  }

 private:
  double o_, h_;
  std::vector<double> v_;
};

class ScaledKernel final : public BumpKernel {
 public:
  ScaledKernel(std::shared_ptr<const BumpKernel> k, double f) : k_(std::move(k)), f_(f) {}
  double operator()(const Vec& x) const override { return f_ * (*k_)(x); }
  std::vector<double> breakpoints() const override { return k_->breakpoints(); }

 private:
  std::shared_ptr<const BumpKernel> k_;
  double f_;
};

class ReflectedKernel final : public BumpKernel {
 public:
  explicit ReflectedKernel(std::shared_ptr<const BumpKernel> k) : k_(std::move(k)) {}
  double operator()(const Vec& x) const override { return (*k_)(-x); }
  std::vector<double> breakpoints() const override {
    auto b = k_->breakpoints();
    for (auto& v : b) v = -v;
    return b;
  }

 private:
  std::shared_ptr<const BumpKernel> k_;
};

/// phi(x_head) * psi(x_tail)
class TensorKernel final : public BumpKernel {
 public:
  TensorKernel(std::shared_ptr<const BumpKernel> a, std::shared_ptr<const BumpKernel> b, int da, int db)
      : a_(std::move(a)), b_(std::move(b)), da_(da), db_(db) {}
  double operator()(const Vec& x) const override {
    const double va = (*a_)(x.head(da_));
    if (va == 0.0) return 0.0;
    return va * (*b_)(x.segment(da_, db_));
  }

 private:
  std::shared_ptr<const BumpKernel> a_, b_;
  int da_, db_;
};

class ProductKernel final : public BumpKernel {
 public:
  ProductKernel(std::shared_ptr<const BumpKernel> a, std::shared_ptr<const BumpKernel> b)
      : a_(std::move(a)), b_(std::move(b)) {}
  double operator()(const Vec& x) const override {
    const double va = (*a_)(x);
    if (va == 0.0) return 0.0;
    return va * (*b_)(x);
  }
  std::vector<double> breakpoints() const override {
    auto b = a_->breakpoints();
    auto c = b_->breakpoints();
    b.insert(b.end(), c.begin(), c.end());
    return b;
  }

 private:
  std::shared_ptr<const BumpKernel> a_, b_;
};

struct DeloneData {
  std::vector<double> centers;  // sorted
  BumpFunction psi;
  double reach_lo, reach_hi;    // supp psi relative to its centre

  double total(double x) const {
    // psi(x - lambda) != 0 needs x - reach_hi <= lambda <= x - reach_lo
    auto lo = std::lower_bound(centers.begin(), centers.end(), x - reach_hi);
    auto hi = std::upper_bound(centers.begin(), centers.end(), x - reach_lo);
    CompensatedSum<double> s;
    for (auto it = lo; it != hi; ++it) s += psi(x - *it);
    return s.value();
  }
};

class DeloneKernel final : public BumpKernel {
 public:
  DeloneKernel(std::shared_ptr<const DeloneData> data, double lambda) : data_(std::move(data)), lambda_(lambda) {}
  double operator()(const Vec& x) const override {
    const double num = data_->psi(x[0] - lambda_);
    if (num == 0.0) return 0.0;
    return num / data_->total(x[0]);
  }

 private:
  std::shared_ptr<const DeloneData> data_;
  double lambda_;
};

Box intersection(const Box& a, const Box& b) {
  const Vec lo = a.lower().cwiseMax(b.lower());
  const Vec hi = a.upper().cwiseMin(b.upper());
  if ((hi.array() <= lo.array()).any()) throw GeometryError("coverage windows do not overlap");
  return Box::from_bounds(lo, hi);
}

}  // namespace

// ---------------------------------------------------------------------------

BumpFunction BumpFunction::triangle(double center, double half_width, double height) {
  if (!(half_width > 0.0)) throw ParameterError("triangle half width must be positive");
  return BumpFunction(Vec::Constant(1, center), Box::interval(center - half_width, center + half_width),
                      std::make_shared<TriangleKernel>(center, half_width, height));
}

BumpFunction BumpFunction::smoothed_box(double center, double cell, double w) {
  if (!(cell > 0.0) || !(w > 0.0)) throw ParameterError("smoothed box needs positive cell and mollifier widths");
  const double reach = 0.5 * cell + w;
  return BumpFunction(Vec::Constant(1, center), Box::interval(center - reach, center + reach),
                      std::make_shared<SmoothedBoxKernel>(center, 0.5 * cell, w));
}

BumpFunction BumpFunction::table(double center, double origin, double step, std::vector<double> values) {
  if (!(step > 0.0) || values.size() < 2) throw ParameterError("table bump needs a positive step and >= 2 samples");
  const double end = origin + step * static_cast<double>(values.size() - 1);
  return BumpFunction(Vec::Constant(1, center), Box::interval(origin, end),
                      std::make_shared<TableKernel>(origin, step, std::move(values)));
}

BumpFunction BumpFunction::scaled(double factor) const {
  return BumpFunction(center_, support_, std::make_shared<ScaledKernel>(kernel_, factor));
}

// ---------------------------------------------------------------------------

Bupu::Bupu(std::string kind, std::vector<BumpFunction> functions, Box size_u, double norm_m, int overlap_b,
           Box coverage)
    : kind_(std::move(kind)),
      functions_(std::move(functions)),
      size_u_(std::move(size_u)),
      norm_m_(norm_m),
      overlap_b_(overlap_b),
      coverage_(std::move(coverage)) {
  if (!(norm_m_ > 0.0)) throw ParameterError("BUPU norm must be positive");
  if (overlap_b_ < 1) throw ParameterError("BUPU overlap constant must be >= 1");
  order_.resize(functions_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  auto lo = [&](std::size_t i) { return functions_[i].center()[0] + size_u_.lower()[0]; };
  std::sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) { return lo(a) < lo(b); });
  for (std::size_t i : order_) cell_lo_.push_back(lo(i));
  max_cell_width_ = 2.0 * size_u_.half_widths()[0];
}

std::vector<Vec> Bupu::centers() const {
  std::vector<Vec> c;
  c.reserve(functions_.size());
  for (const auto& f : functions_) c.push_back(f.center());
  return c;
}

std::vector<int> Bupu::center_multiplicities() const {
  std::vector<int> r(functions_.size(), 0);
  for (std::size_t i = 0; i < functions_.size(); ++i)
    for (std::size_t j = 0; j < functions_.size(); ++j)
      if (functions_[i].center() == functions_[j].center()) ++r[i];
  return r;
}

std::vector<std::size_t> Bupu::active(const Vec& x) const {
  std::vector<std::size_t> out;
  auto first = std::lower_bound(cell_lo_.begin(), cell_lo_.end(), x[0] - max_cell_width_ * (1 + 1e-12) - 1e-12);
  for (auto it = first; it != cell_lo_.end() && *it <= x[0]; ++it) {
    const std::size_t i = order_[static_cast<std::size_t>(it - cell_lo_.begin())];
    if (size_u_.translated(functions_[i].center()).contains(x)) out.push_back(i);
  }
  return out;
}

double Bupu::sum_at(const Vec& x) const {
  CompensatedSum<double> s;
  for (std::size_t i : active(x)) s += functions_[i](x);
  return s.value();
}

Bupu Bupu::with_scaled_function(std::size_t i, double factor) const {
  auto fs = functions_;
  fs.at(i) = fs.at(i).scaled(factor);
  return Bupu(kind_ + "+scaled", std::move(fs), size_u_, norm_m_, overlap_b_, coverage_);
}

Bupu Bupu::reflected() const {
  std::vector<BumpFunction> fs;
  for (const auto& f : functions_)
    fs.emplace_back(-f.center(), f.support().reflected(), std::make_shared<ReflectedKernel>(f.kernel()));
  return Bupu(kind_ + "+reflected", std::move(fs), size_u_.reflected(), norm_m_, overlap_b_, coverage_.reflected());
}

// ---------------------------------------------------------------------------

int overlap_count(const std::vector<Vec>& centers, const Box& u) {
  const Box uu = u.difference(u);
  int best = 0;
  for (const auto& xi : centers) {
    int n = 0;
    for (const auto& xj : centers)
      if (uu.contains(xj - xi, 1e-12)) ++n;
    best = std::max(best, n);
  }
  return best;
}

Bupu triangular_bupu(double spacing, const Box& window) {
  if (!(spacing > 0.0)) throw ParameterError("triangular BUPU spacing must be positive");
  if (window.dim() != 1) throw ParameterError("triangular BUPU lives on the real line");
  const double lo = window.lower()[0] - spacing;
  const double hi = window.upper()[0] + spacing;
  std::vector<BumpFunction> fs;
  for (long long n = static_cast<long long>(std::ceil(lo / spacing)); static_cast<double>(n) * spacing <= hi; ++n)
    fs.push_back(BumpFunction::triangle(static_cast<double>(n) * spacing, spacing));
  return Bupu("triangular", std::move(fs), Box::interval(-spacing, spacing), 1.0, 5, window);
}

Bupu product_bupu(const Bupu& a, const Bupu& b) {
  std::vector<BumpFunction> fs;
  fs.reserve(a.size() * b.size());
  for (const auto& f : a.functions()) {
    for (const auto& g : b.functions()) {
      Vec c(f.dim() + g.dim());
      c << f.center(), g.center();
      fs.emplace_back(c, f.support().product(g.support()),
                      std::make_shared<TensorKernel>(f.kernel(), g.kernel(), f.dim(), g.dim()));
    }
  }
  return Bupu("product(" + a.kind() + "," + b.kind() + ")", std::move(fs), a.size_u().product(b.size_u()),
              a.norm_m() * b.norm_m(), a.overlap_b() * b.overlap_b(), a.coverage().product(b.coverage()));
}

Bupu smooth_bupu(const BoxIndicatorFamily& raw, double mollifier_width, double size_half_width) {
  const double s = raw.spacing;
  if (!(s > 0.0) || !(mollifier_width > 0.0)) throw ParameterError("smoothing needs positive spacing and width");
  if (raw.window.dim() != 1) throw ParameterError("indicator family lives on the real line");
  const double u = size_half_width > 0.0 ? size_half_width : s;
  const double v = std::max(0.5 * s, mollifier_width);
  if (2.0 * v > u * (1.0 + 1e-12))
    throw GeometryError("mollifier too wide: V+V is not contained in the size U");
  const double lo = raw.window.lower()[0] - u;
  const double hi = raw.window.upper()[0] + u;
  std::vector<BumpFunction> fs;
  for (long long n = static_cast<long long>(std::ceil(lo / s)); static_cast<double>(n) * s <= hi; ++n) {
    auto bump = BumpFunction::smoothed_box(static_cast<double>(n) * s, s, mollifier_width);
    fs.push_back(raw.height == 1.0 ? bump : bump.scaled(raw.height));
  }
  const Box size = Box::interval(-u, u);
  std::vector<Vec> centers;
  for (const auto& f : fs) centers.push_back(f.center());
  const int b = overlap_count(centers, size);
  // ||phi_i * psi||_inf <= ||phi_i||_inf ||psi||_1 with ||psi||_1 = 1
  return Bupu("smoothed", std::move(fs), size, std::abs(raw.height), b, raw.window);
}

Bupu delone_bupu(const std::vector<double>& centers, const BumpFunction& psi, const Box& v, const Box& window) {
  if (centers.empty()) throw GeometryError("Delone BUPU needs at least one centre");
  if (window.dim() != 1 || v.dim() != 1 || psi.dim() != 1) throw ParameterError("Delone BUPU lives on the real line");
  if (psi.center()[0] != 0.0) throw ParameterError("psi must be centred at 0");
  const Box u = psi.support().translated(-psi.center());
  if (!u.contains(v.difference(v))) throw GeometryError("supp psi does not contain V - V");
  const double step = 1e-3;
  for (double y = v.lower()[0]; y <= v.upper()[0]; y += step)
    if (psi(psi.center()[0] + y) < 1.0 - 1e-12) throw ParameterError("psi must be >= 1 on V");

  auto data = std::make_shared<DeloneData>(DeloneData{centers, psi, u.lower()[0], u.upper()[0]});
  std::sort(data->centers.begin(), data->centers.end());

  const double a = window.lower()[0];
  const double b = window.upper()[0];
  const auto n = static_cast<long long>(std::ceil((b - a) / step));
  for (long long k = 0; k <= n; ++k) {
    const double x = std::min(b, a + static_cast<double>(k) * step);
    if (data->total(x) < 1.0 - 1e-12)
      throw GeometryError("centres are not V-relatively dense: sum of psi translates < 1 at x = " +
                          std::to_string(x));
  }

  std::vector<BumpFunction> fs;
  std::vector<Vec> cs;
  for (double lambda : data->centers) {
    fs.emplace_back(Vec::Constant(1, lambda), u.translated(Vec::Constant(1, lambda)),
                    std::make_shared<DeloneKernel>(data, lambda));
    cs.push_back(Vec::Constant(1, lambda));
  }
  const int overlap = overlap_count(cs, u);
  return Bupu("delone", std::move(fs), u, 1.0, overlap, window);
}

Bupu refine(const Bupu& a, const Bupu& b) {
  if (a.dim() != b.dim()) throw ParameterError("refinement needs BUPUs of the same dimension");
  std::vector<BumpFunction> fs;
  for (const auto& f : a.functions()) {
    const Box cell = a.size_u().translated(f.center());
    for (const auto& g : b.functions()) {
      // products of functions whose cells only touch vanish identically
      if (!cell.overlaps(b.size_u().translated(g.center()))) continue;
      fs.emplace_back(f.center(), f.support(), std::make_shared<ProductKernel>(f.kernel(), g.kernel()));
    }
  }
  const double ny = point_family_norm(b.centers(), a.size_u().difference(b.size_u()));
  return Bupu("refine(" + a.kind() + "|" + b.kind() + ")", std::move(fs), a.size_u(), a.norm_m() * b.norm_m(),
              a.overlap_b() * static_cast<int>(ny), intersection(a.coverage(), b.coverage()));
}

// ---------------------------------------------------------------------------

bool AxiomReport::passes(double sum_tolerance) const {
  return max_sum_deviation <= sum_tolerance && measured_overlap <= declared_overlap &&
         measured_norm <= declared_norm * (1.0 + 1e-12) && support_violations == 0 && sandwich_holds;
}

AxiomReport verify_axioms(const Bupu& b, const Box& window, std::size_t samples, std::uint64_t seed) {
  AxiomReport rep;
  const int d = b.dim();
  const Box region = intersection(window, b.coverage());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const Box& box) {
    Vec x(d);
    for (int k = 0; k < d; ++k) x[k] = box.lower()[k] + 2.0 * box.half_widths()[k] * unit(rng);
    return x;
  };

  rep.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    const Vec x = draw(region);
    rep.max_sum_deviation = std::max(rep.max_sum_deviation, std::abs(b.sum_at(x) - 1.0));
  }

  const auto centers = b.centers();
  rep.declared_overlap = b.overlap_b();
  rep.measured_overlap = overlap_count(centers, b.size_u());
  rep.declared_norm = b.norm_m();

  // sup norms on a tensor grid over each cell, plus the centre
  const int per_axis = d == 1 ? 257 : (d == 2 ? 33 : 9);
  const Box shell = b.size_u().scaled(1.01);
  for (const auto& f : b.functions()) {
    const Box cell = b.size_u().translated(f.center());
    double m = std::abs(f(f.center()));
    std::vector<int> idx(d, 0);
    Vec x(d);
    while (true) {
      for (int k = 0; k < d; ++k)
        x[k] = cell.lower()[k] + 2.0 * cell.half_widths()[k] * idx[k] / static_cast<double>(per_axis - 1);
      m = std::max(m, std::abs(f(x)));
      int k = d - 1;
      while (k >= 0) {
        if (++idx[k] < per_axis) break;
        idx[k] = 0;
        --k;
      }
      if (k < 0) break;
    }
    rep.measured_norm = std::max(rep.measured_norm, m);

    const Box outer = shell.translated(f.center());
    bool leaked = false;
    for (int t = 0; t < 16 && !leaked;) {
      const Vec y = draw(outer);
      if (cell.contains(y)) continue;
      ++t;
      if (f(y) != 0.0) leaked = true;
    }
    if (leaked) ++rep.support_violations;
  }

  rep.sandwich_lower = point_family_norm(centers, b.size_u().reflected());
  rep.sandwich_upper = point_family_norm(centers, b.size_u().difference(b.size_u()));
  rep.sandwich_holds = rep.sandwich_lower <= rep.measured_overlap && rep.measured_overlap <= rep.sandwich_upper;
  int mult = 1;
  for (int r : b.center_multiplicities()) mult = std::max(mult, r);
  rep.max_center_multiplicity = mult;
  return rep;
}

}  // namespace qcdiff
