#pragma once

// Weighted Dirac combs sum_p w_p delta_p materialised on a finite window.

#include "qcdiff/core.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace qcdiff {

/// Coincidence tolerance for merging difference vectors.
inline constexpr double kMergeTolerance = 1e-9;

class WeightedComb {
 public:
  WeightedComb() = default;
  /// Sorts points lexicographically and merges exact coincidences, summing
  /// their weights and recording the multiplicity. Every point must lie in
  /// the window.
  WeightedComb(std::vector<Vec> points, std::vector<cplx> weights, Box window);
  /// Unit weights.
  static WeightedComb dirac(std::vector<Vec> points, Box window);
  /// Integer points k*spacing inside the window (spacing 1 gives delta_Z).
  static WeightedComb lattice_1d(const Box& window, double spacing = 1.0);

  int dim() const { return window_.dim(); }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const std::vector<Vec>& points() const { return points_; }
  const std::vector<cplx>& weights() const { return weights_; }
  /// Number of original points merged into each stored point.
  const std::vector<int>& multiplicities() const { return multiplicities_; }
  int max_multiplicity() const;
  const Box& window() const { return window_; }

  WeightedComb scaled(cplx factor) const;
  /// Point reflection x -> -x with conjugated weights.
  WeightedComb reflected() const;
  double total_variation() const;

 private:
  std::vector<Vec> points_;
  std::vector<cplx> weights_;
  std::vector<int> multiplicities_;
  Box window_;
};

/// sup over x of |mu|(x + K). Exact: the supremum of a sum over a closed
/// box is attained with every lower face touching a point, which is searched
/// slab by slab. Points are compared with a 1e-12 relative slack.
double comb_norm(const WeightedComb& mu, const Box& k);

/// Same as comb_norm for a unit-weight point family (repetitions counted).
double point_family_norm(const std::vector<Vec>& points, const Box& k);

struct GeometryReport {
  bool uniformly_discrete = false;
  double separation_radius = 0.0;  ///< half the minimal distance between distinct points
  int max_multiplicity = 1;
  bool relatively_dense = false;
  double covering_radius = 0.0;    ///< on the window eroded by K
  bool weakly_uniformly_discrete = false;
  double comb_norm_k = 0.0;        ///< ||delta_X||_K
};

/// Euclidean distances. Covering radius is exact in d = 1 and measured on a
/// grid of step min(0.01, separation/4) for d >= 2.
GeometryReport geometry(const WeightedComb& c, const Box& k);

/// Points in the closed box a; the result's window is a.
WeightedComb restrict(const WeightedComb& c, const Box& a);

/// (1/volume) sum_{p,q} w_p conj(w_q) delta_{p-q}; differences closer than
/// kMergeTolerance (max norm) are merged. With a cutoff, only differences of
/// max-norm at most the cutoff are kept.
WeightedComb autocorrelation_finite(const WeightedComb& c, double volume,
                                    std::optional<double> cutoff = std::nullopt);

using TestFunction = std::function<cplx(const Vec&)>;

/// mu(f) = sum_p w_p f(p), compensated. EvaluationError when f is not finite
/// at some point.
cplx evaluate(const WeightedComb& c, const TestFunction& f);

/// (mu * f)(x) = sum_p w_p f(x - p).
cplx convolve_at(const WeightedComb& c, const TestFunction& f, const Vec& x);

}  // namespace qcdiff
