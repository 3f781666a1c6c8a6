#include "qcdiff/oracles.hpp"

#include <algorithm>
#include <numeric>

namespace qcdiff::oracle {

std::vector<std::vector<long long>> enumerate(const CutProjectScheme& scheme, const Box& physical,
                                              const Box& internal) {
  const int n = scheme.dim();
  const Box whole = physical.product(internal);
  const Vec reach = whole.lower().cwiseAbs().cwiseMax(whole.upper().cwiseAbs());
  // |c_i| = |(B^-1 z)_i| <= sum_j |B^-1_ij| reach_j for every z in the box
  const Vec bound = scheme.basis().inverse().cwiseAbs() * reach;
  std::vector<long long> k(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) k[static_cast<std::size_t>(i)] = static_cast<long long>(std::ceil(bound[i])) + 1;

  std::vector<std::vector<long long>> out;
  std::vector<long long> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = -k[static_cast<std::size_t>(i)];
  Vec z(n);
  while (true) {
    Vec c(n);
    for (int i = 0; i < n; ++i) c[i] = static_cast<double>(idx[static_cast<std::size_t>(i)]);
    z = scheme.basis() * c;
    if (physical.contains(z.head(scheme.physical_dim())) && internal.contains(z.tail(scheme.internal_dim())))
      out.push_back(idx);
    int i = n - 1;
    while (i >= 0) {
      const auto u = static_cast<std::size_t>(i);
      if (++idx[u] <= k[u]) break;
      idx[u] = -k[u];
      --i;
    }
    if (i < 0) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

double separation(const std::vector<Vec>& points) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) best = std::min(best, (points[i] - points[j]).norm());
  return std::isfinite(best) ? 0.5 * best : 0.0;
}

double covering_1d(const std::vector<double>& points, double lo, double hi) {
  std::vector<double> cand{lo, hi};
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const double m = 0.5 * (points[i] + points[j]);
      if (m >= lo && m <= hi) cand.push_back(m);
    }
  double worst = 0.0;
  for (double x : cand) {
    double d = std::numeric_limits<double>::infinity();
    for (double p : points) d = std::min(d, std::abs(x - p));
    worst = std::max(worst, d);
  }
  return worst;
}

double comb_norm(const std::vector<Vec>& points, const std::vector<double>& abs_weights, const Box& k) {
  if (points.empty()) return 0.0;
  const int d = k.dim();
  const Vec lo = k.lower(), hi = k.upper();
  const std::size_t n = points.size();
  double best = 0.0;
  std::vector<std::size_t> pick(static_cast<std::size_t>(d), 0);
  while (true) {
    Vec x(d);
    for (int a = 0; a < d; ++a) x[a] = points[pick[static_cast<std::size_t>(a)]][a] - lo[a];
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      bool in = true;
      for (int a = 0; a < d && in; ++a) {
        const double slack = 1e-12 * std::max(1.0, std::abs(points[i][a]));
        in = points[i][a] >= x[a] + lo[a] - slack && points[i][a] <= x[a] + hi[a] + slack;
      }
      if (in) s += abs_weights[i];
    }
    best = std::max(best, s);
    int a = d - 1;
    while (a >= 0) {
      if (++pick[static_cast<std::size_t>(a)] < n) break;
      pick[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  return best;
}

std::vector<Coefficient> autocorrelation(const std::vector<Vec>& points, const std::vector<cplx>& weights,
                                         double volume, double tol) {
  std::vector<Coefficient> diffs;
  diffs.reserve(points.size() * points.size());
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = 0; j < points.size(); ++j)
      diffs.push_back({points[i] - points[j], weights[i] * std::conj(weights[j]) / volume});
  std::sort(diffs.begin(), diffs.end(), [](const Coefficient& a, const Coefficient& b) { return lex_less(a.z, b.z); });

  // single linkage through a sweep on the first coordinate
  std::vector<std::size_t> parent(diffs.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t i = 0; i < diffs.size(); ++i)
    for (std::size_t j = i + 1; j < diffs.size() && diffs[j].z[0] - diffs[i].z[0] <= tol; ++j)
      if ((diffs[i].z - diffs[j].z).cwiseAbs().maxCoeff() <= tol) parent[root(j)] = root(i);

  std::vector<Coefficient> out;
  std::vector<long> slot(diffs.size(), -1);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    const std::size_t r = root(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(out.size());
      out.push_back({diffs[r].z, 0.0});
    }
    out[static_cast<std::size_t>(slot[r])].value += diffs[i].value;
  }
  std::sort(out.begin(), out.end(), [](const Coefficient& a, const Coefficient& b) { return lex_less(a.z, b.z); });
  return out;
}

}  // namespace qcdiff::oracle
