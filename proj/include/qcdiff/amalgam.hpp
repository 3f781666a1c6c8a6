#pragma once

// Wiener amalgam norms over a BUPU, the homogeneous norm, dual (measure)
// norm sandwiches and the S0 norm through the short-time Fourier transform.

#include "qcdiff/bupu.hpp"
#include "qcdiff/combs.hpp"
#include "qcdiff/core.hpp"
#include "qcdiff/profile.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qcdiff {

/// Uniform tensor grid: node i has coordinates origin + i .* step.
struct Grid {
  Vec origin;
  Vec step;
  std::vector<int> count;

  static Grid uniform(double lo, double hi, int n);
  static Grid over(const Box& box, double step);
  int dim() const { return static_cast<int>(count.size()); }
  std::size_t size() const;
  Box box() const;
  Vec node(std::size_t flat) const;
  double node_1d(int i) const { return origin[0] + step[0] * i; }
};

/// Samples of a function on a grid, optionally tagged with a closed form
/// (tensor product of profiles) used for exact evaluation and transforms.
/// Off-grid evaluation interpolates multilinearly; outside the grid the
/// function is zero.
class SampledFunction {
 public:
  SampledFunction(Grid grid, std::vector<cplx> values);
  static SampledFunction sample(std::vector<Profile> factors, Grid grid);
  static SampledFunction sample(const Profile& p, Grid grid) { return sample(std::vector<Profile>{p}, std::move(grid)); }
  static SampledFunction zero(Grid grid);

  int dim() const { return grid_.dim(); }
  const Grid& grid() const { return grid_; }
  const std::vector<cplx>& values() const { return values_; }
  const std::optional<std::vector<Profile>>& closed_form() const { return closed_; }
  Box support_box() const { return grid_.box(); }

  cplx operator()(const Vec& x) const;
  cplx operator()(double x) const { return (*this)(Vec::Constant(1, x)); }
  /// Interpolated value, ignoring the closed form.
  cplx interpolate(const Vec& x) const;

  SampledFunction translated(const Vec& a) const;
  SampledFunction scaled(cplx a) const;
  SampledFunction conj() const;
  /// Nodewise modulus; between nodes this interpolates |f(x_k)|, which
  /// exceeds |f| in cells where f changes sign.
  SampledFunction abs() const;
  /// f(-x)
  SampledFunction reflected() const;
  /// exp(2 pi i beta s) f(s), one-dimensional
  SampledFunction modulated(double beta) const;
  SampledFunction operator+(const SampledFunction& other) const;

  double sup_norm() const;
  /// Fourier transform of the closed form sampled on `grid`; throws
  /// UnsupportedWeightError without a closed form.
  SampledFunction fourier(Grid grid) const;

  /// Values at sample points not matching the closed form beyond 1e-12.
  bool consistent() const;

 private:
  Grid grid_;
  std::vector<cplx> values_;
  std::optional<std::vector<Profile>> closed_;
};

struct NormReport {
  double phi_norm = 0.0;          ///< ||f||_{W,Phi}
  double homogeneous_norm = 0.0;  ///< sup over sampled translates (lower bound)
  double upper_bound = 0.0;       ///< ||delta_X||_{U-U} M ||f||_Phi
  double argmax = 0.0;            ///< first coordinate of the maximising translate
  std::size_t translate_count = 0;
};

/// sum_i sup_{x_i + U} |f phi_i|. In one dimension the sup is searched on
/// the union of the function's grid and the bump's break points, where
/// |f phi|^2 is a quartic on each sub-interval maximised in closed form; this
/// is exact for piecewise linear data. Higher dimensions sample the cell on the
/// refined grid. GeometryError if supp f is not inside the coverage eroded by U.
double wiener_norm(const SampledFunction& f, const Bupu& phi);

/// sup_{|x|_inf <= radius, x in step Z^d} ||T_x f||_Phi together with the
/// a-priori upper bound.
NormReport homogeneous_norm(const SampledFunction& f, const Bupu& phi, double step, double radius);

struct OperatorNormSandwich {
  double lower = 0.0;         ///< ||mu||_U / (M ||delta_X||_{U-U})
  double upper = 0.0;         ///< ||mu||_U
  double max_quotient = 0.0;  ///< max |mu(f)| / ||f||_Phi over the battery
  std::size_t tests = 0;
  std::size_t violations = 0; ///< quotients above upper
};

/// Certified bounds for the dual norm of mu on W(G) with the BUPU norm,
/// exercised on `tests` random piecewise linear test functions.
OperatorNormSandwich operator_norm_sandwich(const WeightedComb& mu, const Bupu& phi, std::size_t tests = 100,
                                            std::uint64_t seed = 7);

/// Random piecewise linear function on [lo, hi] (zero at both ends) sampled
/// with `knots` interior knots; used for norm batteries.
SampledFunction random_piecewise_linear(double lo, double hi, int knots, std::uint64_t seed, bool complex_values = false);

// ---------------------------------------------------------------------------
// STFT and S0

struct StftResult {
  Grid time;
  Grid freq;
  Eigen::MatrixXcd values;  ///< rows: time, columns: frequency
};

/// V_g f(t, xi) = \int f(s) e^{-2 pi i xi s} conj g(s - t) ds by the
/// trapezoid rule on f's grid. One-dimensional only.
StftResult stft(const SampledFunction& f, const SampledFunction& g, const Grid& time, const Grid& freq);

struct S0Report {
  double value = 0.0;              ///< \iint |V_g f|
  double boundary_mass_ratio = 0.0;///< mass in the outer 10% band / total
  double coarse_value = 0.0;       ///< same integral on every other node
  double richardson_delta = 0.0;   ///< |value - coarse_value|
  bool accepted = false;           ///< richardson_delta <= tolerance * value
};

/// ||f||_{S0,g} by 2-D trapezoid over time x freq. TruncationError when the
/// boundary band carries more than `max_boundary_ratio` of the mass.
S0Report s0_norm(const SampledFunction& f, const SampledFunction& g, const Grid& time, const Grid& freq,
                 double tolerance = 1e-4, double max_boundary_ratio = 1e-6);

/// Default window e^{-pi s^2} sampled on [-12, 12] with step 1/32.
SampledFunction default_window();

}  // namespace qcdiff
