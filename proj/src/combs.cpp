#include "qcdiff/combs.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace qcdiff {

WeightedComb::WeightedComb(std::vector<Vec> points, std::vector<cplx> weights, Box window)
    : window_(std::move(window)) {
  if (points.size() != weights.size()) throw ParameterError("comb needs one weight per point");
  const int d = window_.dim();
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (const auto& p : points) {
    if (p.size() != d) throw ParameterError("comb point dimension differs from its window");
    if (!window_.contains(p, 1e-12 * (1.0 + window_.half_widths().cwiseAbs().maxCoeff())))
      throw GeometryError("comb point lies outside its window");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(points[a], points[b]); });
  for (std::size_t idx : order) {
    if (!points_.empty() && points_.back() == points[idx]) {
      weights_.back() += weights[idx];
      ++multiplicities_.back();
    } else {
      points_.push_back(points[idx]);
      weights_.push_back(weights[idx]);
      multiplicities_.push_back(1);
    }
  }
}

WeightedComb WeightedComb::dirac(std::vector<Vec> points, Box window) {
  std::vector<cplx> w(points.size(), cplx(1.0, 0.0));
  return WeightedComb(std::move(points), std::move(w), std::move(window));
}

WeightedComb WeightedComb::lattice_1d(const Box& window, double spacing) {
  if (window.dim() != 1) throw ParameterError("lattice_1d needs a one-dimensional window");
  if (!(spacing > 0.0)) throw ParameterError("spacing must be positive");
  const long long lo = static_cast<long long>(std::ceil(window.lower()[0] / spacing));
  const long long hi = static_cast<long long>(std::floor(window.upper()[0] / spacing));
  std::vector<Vec> pts;
  for (long long k = lo; k <= hi; ++k) pts.push_back(Vec::Constant(1, static_cast<double>(k) * spacing));
  return dirac(std::move(pts), window);
}

int WeightedComb::max_multiplicity() const {
  int m = 0;
  for (int r : multiplicities_) m = std::max(m, r);
  return m;
}

WeightedComb WeightedComb::scaled(cplx factor) const {
  WeightedComb out = *this;
  for (auto& w : out.weights_) w *= factor;
  return out;
}

WeightedComb WeightedComb::reflected() const {
  std::vector<Vec> pts;
  std::vector<cplx> w;
  for (std::size_t i = 0; i < size(); ++i) {
    for (int r = 0; r < multiplicities_[i]; ++r) {
      pts.push_back(-points_[i]);
      w.push_back(r == 0 ? std::conj(weights_[i]) : cplx(0.0));
    }
  }
  return WeightedComb(std::move(pts), std::move(w), window_.reflected());
}

double WeightedComb::total_variation() const {
  CompensatedSum<double> s;
  for (const auto& w : weights_) s += std::abs(w);
  return s.value();
}

// ---------------------------------------------------------------------------
// translation-bounded norm

namespace {

struct Atom {
  const Vec* p;
  double mass;
};

double slab_max(std::vector<Atom> atoms, const Vec& widths, int k) {
  if (atoms.empty()) return 0.0;
  const int d = static_cast<int>(widths.size());
  std::sort(atoms.begin(), atoms.end(), [k](const Atom& a, const Atom& b) { return (*a.p)[k] < (*b.p)[k]; });
  const double w = widths[k];
  auto within = [&](double lo, double v) { return v - lo <= w + 1e-12 * (1.0 + std::abs(w) + std::abs(lo)); };
  double best = 0.0;
  if (k == d - 1) {
    double acc = 0.0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (j < i) {
        j = i;
        acc = 0.0;
      }
      while (j < atoms.size() && within((*atoms[i].p)[k], (*atoms[j].p)[k])) acc += atoms[j++].mass;
      best = std::max(best, acc);
      acc -= atoms[i].mass;
    }
    return best;
  }
  std::size_t i = 0;
  while (i < atoms.size()) {
    const double lo = (*atoms[i].p)[k];
    std::vector<Atom> slab;
    for (std::size_t j = i; j < atoms.size() && within(lo, (*atoms[j].p)[k]); ++j) slab.push_back(atoms[j]);
    best = std::max(best, slab_max(std::move(slab), widths, k + 1));
    while (i < atoms.size() && (*atoms[i].p)[k] == lo) ++i;
  }
  return best;
}

}  // namespace

double comb_norm(const WeightedComb& mu, const Box& k) {
  if (mu.empty()) return 0.0;
  if (k.dim() != mu.dim()) throw ParameterError("comb_norm: box dimension differs from comb");
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < mu.size(); ++i) atoms.push_back({&mu.points()[i], std::abs(mu.weights()[i])});
  return slab_max(std::move(atoms), 2.0 * k.half_widths(), 0);
}

double point_family_norm(const std::vector<Vec>& points, const Box& k) {
  if (points.empty()) return 0.0;
  std::vector<Atom> atoms;
  for (const auto& p : points) atoms.push_back({&p, 1.0});
  return slab_max(std::move(atoms), 2.0 * k.half_widths(), 0);
}

// ---------------------------------------------------------------------------
// geometry

namespace {

/// Uniform bucket grid for nearest-point queries in d >= 2.
class BucketGrid {
 public:
  BucketGrid(const std::vector<Vec>& pts, double cell) : pts_(pts), cell_(cell) {
    d_ = static_cast<int>(pts.front().size());
    lo_ = pts.front();
    hi_ = pts.front();
    for (const auto& p : pts) {
      lo_ = lo_.cwiseMin(p);
      hi_ = hi_.cwiseMax(p);
    }
    dims_.resize(d_);
    for (int k = 0; k < d_; ++k) dims_[k] = static_cast<long long>((hi_[k] - lo_[k]) / cell_) + 1;
    for (std::size_t i = 0; i < pts.size(); ++i) buckets_[key(pts[i])].push_back(i);
  }

  double nearest(const Vec& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (long long ring = 0;; ++ring) {
      // every point in ring r is at least (r-1)*cell away
      if (ring >= 1 && static_cast<double>(ring - 1) * cell_ > best) break;
      visit_ring(x, ring, [&](std::size_t i) { best = std::min(best, (pts_[i] - x).norm()); });
      if (ring > max_ring()) break;
    }
    return best;
  }

 private:
  long long max_ring() const {
    long long m = 0;
    for (long long v : dims_) m = std::max(m, v);
    return m + 2;
  }
  std::vector<long long> cell_of(const Vec& x) const {
    std::vector<long long> c(d_);
    for (int k = 0; k < d_; ++k) c[k] = static_cast<long long>(std::floor((x[k] - lo_[k]) / cell_));
    return c;
  }
  long long encode(const std::vector<long long>& c) const {
    long long code = 0;
    for (int k = 0; k < d_; ++k) code = code * 4'000'003LL + (c[k] + 2'000'000LL);
    return code;
  }
  long long key(const Vec& x) const { return encode(cell_of(x)); }

  template <class F>
  void visit_ring(const Vec& x, long long r, F&& f) const {
    const auto c = cell_of(x);
    std::vector<long long> off(d_, -r);
    while (true) {
      long long linf = 0;
      for (long long o : off) linf = std::max(linf, std::abs(o));
      if (linf == r) {
        std::vector<long long> cc(d_);
        for (int k = 0; k < d_; ++k) cc[k] = c[k] + off[k];
        auto it = buckets_.find(encode(cc));
        if (it != buckets_.end())
          for (std::size_t i : it->second) f(i);
      }
      int k = d_ - 1;
      while (k >= 0) {
        if (++off[k] <= r) break;
        off[k] = -r;
        --k;
      }
      if (k < 0) break;
    }
  }

  const std::vector<Vec>& pts_;
  double cell_;
  int d_ = 0;
  Vec lo_, hi_;
  std::vector<long long> dims_;
  std::unordered_map<long long, std::vector<std::size_t>> buckets_;
};

double covering_radius_1d(const std::vector<Vec>& pts, double a, double b) {
  std::vector<double> xs;
  for (const auto& p : pts) xs.push_back(p[0]);
  auto dist = [&](double x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    double best = std::numeric_limits<double>::infinity();
    if (it != xs.end()) best = std::min(best, *it - x);
    if (it != xs.begin()) best = std::min(best, x - *std::prev(it));
    return best;
  };
  double r = std::max(dist(a), dist(b));
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double mid = 0.5 * (xs[i] + xs[i + 1]);
    if (mid >= a && mid <= b) r = std::max(r, dist(mid));
  }
  return r;
}

}  // namespace

GeometryReport geometry(const WeightedComb& c, const Box& k) {
  if (c.empty()) throw GeometryError("geometry of an empty comb");
  GeometryReport rep;
  const auto& pts = c.points();
  const int d = c.dim();

  rep.max_multiplicity = c.max_multiplicity();
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (pts[j][0] - pts[i][0] >= min_dist) break;
      min_dist = std::min(min_dist, (pts[j] - pts[i]).norm());
    }
  }
  if (rep.max_multiplicity > 1) {
    rep.uniformly_discrete = false;
    rep.separation_radius = 0.0;
  } else {
    rep.uniformly_discrete = true;
    rep.separation_radius = 0.5 * min_dist;
  }

  const Box region = c.window().shrunk(k);
  if (d == 1) {
    rep.covering_radius = covering_radius_1d(pts, region.lower()[0], region.upper()[0]);
  } else {
    double step = 0.01;
    if (std::isfinite(rep.separation_radius) && rep.separation_radius > 0.0)
      step = std::min(step, rep.separation_radius / 4.0);
    // keep the probe grid at desk scale
    const double cells = region.volume() / std::pow(step, d);
    if (cells > 2.5e5) step *= std::pow(cells / 2.5e5, 1.0 / d);
    // buckets about the mean spacing keep the nearest-point search local
    const double spacing = std::pow(region.volume() / static_cast<double>(pts.size()), 1.0 / d);
    BucketGrid grid(pts, std::max({step * 8.0, spacing, 1e-3}));
    std::vector<long long> n(d);
    for (int i = 0; i < d; ++i) n[i] = static_cast<long long>(std::floor(2.0 * region.half_widths()[i] / step));
    std::vector<long long> idx(d, 0);
    const Vec lo = region.lower();
    double r = 0.0;
    Vec x(d);
    while (true) {
      for (int i = 0; i < d; ++i) x[i] = lo[i] + static_cast<double>(idx[i]) * step;
      r = std::max(r, grid.nearest(x));
      int i = d - 1;
      while (i >= 0) {
        if (++idx[i] <= n[i]) break;
        idx[i] = 0;
        --i;
      }
      if (i < 0) break;
    }
    rep.covering_radius = r;
  }
  rep.relatively_dense = std::isfinite(rep.covering_radius);
  rep.comb_norm_k = point_family_norm([&] {
    std::vector<Vec> fam;
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (int r = 0; r < c.multiplicities()[i]; ++r) fam.push_back(pts[i]);
    return fam;
  }(), k);
  rep.weakly_uniformly_discrete = std::isfinite(rep.comb_norm_k);
  return rep;
}

WeightedComb restrict(const WeightedComb& c, const Box& a) {
  std::vector<Vec> pts;
  std::vector<cplx> w;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!a.contains(c.points()[i])) continue;
    for (int r = 0; r < c.multiplicities()[i]; ++r) {
      pts.push_back(c.points()[i]);
      w.push_back(r == 0 ? c.weights()[i] : cplx(0.0));
    }
  }
  return WeightedComb(std::move(pts), std::move(w), a);
}

// ---------------------------------------------------------------------------
// finite autocorrelation

namespace {

constexpr int kMaxKeyDim = 4;
using Key = std::array<long long, kMaxKeyDim>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (long long v : k) h = (h ^ static_cast<std::size_t>(v)) * 1099511628211ULL;
    return h;
  }
};

struct Cluster {
  Vec rep;
  CompensatedSum<cplx> sum;
};

class DifferenceAccumulator {
 public:
  explicit DifferenceAccumulator(int d) : d_(d) {
    if (d > kMaxKeyDim) throw ParameterError("autocorrelation supports dimension <= 4");
    zero_.rep = Vec::Zero(d);
  }

  Key key(const Vec& z) const {
    Key k{};
    for (int i = 0; i < d_; ++i) k[i] = std::llround(z[i] / kMergeTolerance);
    return k;
  }
  static int sign(const Key& k) {
    for (long long v : k)
      if (v != 0) return v > 0 ? 1 : -1;
    return 0;
  }

  void add_diagonal(cplx w) { zero_.sum += w; }

  /// z = p - q with weight w_p conj(w_q); its mirror is accounted implicitly.
  void add_pair(const Vec& z, cplx w) {
    Key k = key(z);
    int s = sign(k);
    if (s == 0) {
      zero_.sum += w;
      zero_.sum += std::conj(w);
      return;
    }
    Vec zz = z;
    cplx ww = w;
    if (s < 0) {
      zz = -z;
      ww = std::conj(w);
      for (int i = 0; i < d_; ++i) k[i] = -k[i];
    }
    if (Cluster* c = find(zz, k)) {
      if (c == &zero_) {
        zero_.sum += ww;
        zero_.sum += std::conj(ww);
      } else {
        c->sum += ww;
      }
      return;
    }
    index_.emplace(k, clusters_.size());
    clusters_.push_back(Cluster{zz, {}});
    clusters_.back().sum += ww;
  }

  WeightedComb finish(double volume, const Box& window) const {
    std::vector<Vec> pts;
    std::vector<cplx> w;
    pts.push_back(zero_.rep);
    w.push_back(zero_.sum.value() / volume);
    for (const auto& c : clusters_) {
      const cplx v = c.sum.value() / volume;
      pts.push_back(c.rep);
      w.push_back(v);
      pts.push_back(-c.rep);
      w.push_back(std::conj(v));
    }
    return WeightedComb(std::move(pts), std::move(w), window);
  }

 private:
  Cluster* find(const Vec& z, const Key& k) {
    Key off{};
    std::array<int, kMaxKeyDim> o{};
    for (int i = 0; i < d_; ++i) o[i] = -1;
    while (true) {
      for (int i = 0; i < d_; ++i) off[i] = k[i] + o[i];
      if (sign(off) == 0) {
        if (max_abs_diff(zero_.rep, z) <= kMergeTolerance) return &zero_;
      } else {
        auto it = index_.find(off);
        if (it != index_.end() && max_abs_diff(clusters_[it->second].rep, z) <= kMergeTolerance)
          return &clusters_[it->second];
      }
      int i = d_ - 1;
      while (i >= 0) {
        if (++o[i] <= 1) break;
        o[i] = -1;
        --i;
      }
      if (i < 0) break;
    }
    return nullptr;
  }

  int d_;
  Cluster zero_;
  std::vector<Cluster> clusters_;
  std::unordered_map<Key, std::size_t, KeyHash> index_;
};

}  // namespace

WeightedComb autocorrelation_finite(const WeightedComb& c, double volume, std::optional<double> cutoff) {
  if (!(volume > 0.0)) throw ParameterError("autocorrelation volume must be positive");
  const int d = c.dim();
  DifferenceAccumulator acc(d);
  const auto& pts = c.points();
  const auto& w = c.weights();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    acc.add_diagonal(w[i] * std::conj(w[i]));
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      if (cutoff && pts[j][0] - pts[i][0] > *cutoff) break;
      const Vec z = pts[j] - pts[i];
      if (cutoff && z.cwiseAbs().maxCoeff() > *cutoff) continue;
      acc.add_pair(z, w[j] * std::conj(w[i]));
    }
  }
  Box window = c.empty() ? Box::cube(d, 1.0) : c.window().difference(c.window());
  if (cutoff) window = Box::cube(d, std::max(*cutoff, kMergeTolerance) * (1.0 + 1e-9) + kMergeTolerance);
  return acc.finish(volume, window);
}

cplx evaluate(const WeightedComb& c, const TestFunction& f) {
  CompensatedSum<cplx> s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const cplx v = f(c.points()[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw EvaluationError("test function is not finite at a comb point");
    s += c.weights()[i] * v;
  }
  return s.value();
}

cplx convolve_at(const WeightedComb& c, const TestFunction& f, const Vec& x) {
  CompensatedSum<cplx> s;
  for (std::size_t i = 0; i < c.size(); ++i) s += c.weights()[i] * f(x - c.points()[i]);
  return s.value();
}

}  // namespace qcdiff
