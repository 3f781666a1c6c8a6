#pragma once

// Bounded uniform partitions of unity (BUPUs) materialised on a finite
// coverage window: compactly supported bumps phi_i with centres x_i, a size
// box U (zero neighbourhood), a sup-norm bound M and an overlap bound B such
// that supp phi_i lies in x_i + U and sum_i phi_i = 1 on the window.

#include "qcdiff/combs.hpp"
#include "qcdiff/core.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace qcdiff {

class BumpKernel {
 public:
  virtual ~BumpKernel() = default;
  /// Raw evaluation; not clipped to the declared support.
  virtual double operator()(const Vec& x) const = 0;
  /// One-dimensional kinks of the kernel (empty when unknown or smooth).
  virtual std::vector<double> breakpoints() const { return {}; }
};

/// A compactly supported bump. Immutable; copies share the kernel.
class BumpFunction {
 public:
  BumpFunction(Vec center, Box support, std::shared_ptr<const BumpKernel> kernel)
      : center_(std::move(center)), support_(std::move(support)), kernel_(std::move(kernel)) {}

  /// max(0, 1 - |x - c| / half_width)
  static BumpFunction triangle(double center, double half_width, double height = 1.0);
  /// Indicator of [c - cell/2, c + cell/2) convolved with the area-one
  /// triangle on [-w, w]; closed form, piecewise quadratic.
  static BumpFunction smoothed_box(double center, double cell, double mollifier_half_width);
  /// Linear interpolation of samples on [origin, origin + step*(n-1)], zero outside.
  static BumpFunction table(double center, double origin, double step, std::vector<double> values);

  double operator()(const Vec& x) const { return (*kernel_)(x); }
  double operator()(double x) const { return (*kernel_)(Vec::Constant(1, x)); }
  const Vec& center() const { return center_; }
  /// Absolute box containing the support.
  const Box& support() const { return support_; }
  int dim() const { return static_cast<int>(center_.size()); }
  const std::shared_ptr<const BumpKernel>& kernel() const { return kernel_; }

  BumpFunction scaled(double factor) const;

 private:
  Vec center_;
  Box support_;
  std::shared_ptr<const BumpKernel> kernel_;
};

class Bupu {
 public:
  Bupu(std::string kind, std::vector<BumpFunction> functions, Box size_u, double norm_m, int overlap_b,
       Box coverage);

  const std::string& kind() const { return kind_; }
  int dim() const { return size_u_.dim(); }
  std::size_t size() const { return functions_.size(); }
  const std::vector<BumpFunction>& functions() const { return functions_; }
  const BumpFunction& operator[](std::size_t i) const { return functions_[i]; }
  /// Point family X, repetitions kept.
  std::vector<Vec> centers() const;
  /// Multiplicity r_X of every centre, aligned with functions().
  std::vector<int> center_multiplicities() const;
  const Box& size_u() const { return size_u_; }
  double norm_m() const { return norm_m_; }
  int overlap_b() const { return overlap_b_; }
  /// Window on which the family sums to one.
  const Box& coverage() const { return coverage_; }

  /// Indices whose cell x_i + U contains x.
  std::vector<std::size_t> active(const Vec& x) const;
  double sum_at(const Vec& x) const;

  /// Same family with function i multiplied by factor.
  Bupu with_scaled_function(std::size_t i, double factor) const;
  /// phi_i(-x), centres -x_i.
  Bupu reflected() const;

 private:
  std::string kind_;
  std::vector<BumpFunction> functions_;
  Box size_u_;
  double norm_m_;
  int overlap_b_;
  Box coverage_;
  // functions sorted by cell lower bound in coordinate 0
  std::vector<std::size_t> order_;
  std::vector<double> cell_lo_;
  double max_cell_width_ = 0.0;
};

/// Triangles phi_n(x) = max(0, 1 - |x/alpha - n|) with centres alpha*Z
/// meeting window + U; M = 1, U = [-alpha, alpha], B = 5.
Bupu triangular_bupu(double spacing, const Box& window);

/// Tensor products phi_i (x) psi_j; size U x V, norm M*N, overlap B_a*B_b.
Bupu product_bupu(const Bupu& a, const Bupu& b);

/// Box indicators of width `spacing` centred on spacing*Z, as raw input for
/// the mollified partition.
struct BoxIndicatorFamily {
  double spacing = 1.0;
  Box window;
  double height = 1.0;
};

/// Indicators convolved with the area-one triangle of half width
/// mollifier_width. Size V+V = [-spacing, spacing] by default; GeometryError
/// when the mollified support does not fit the requested size.
Bupu smooth_bupu(const BoxIndicatorFamily& raw, double mollifier_width, double size_half_width = 0.0);

/// phi_lambda = psi(. - lambda) / sum_lambda' psi(. - lambda'). psi must be
/// >= 1 on v and U = supp psi must contain v - v. The sum is checked to be
/// >= 1 on the coverage window (window eroded by U) with step 1e-3;
/// GeometryError otherwise.
Bupu delone_bupu(const std::vector<double>& centers, const BumpFunction& psi, const Box& v, const Box& window);

/// Refinement Phi|Psi: pairs (i, j) with intersecting cells, theta = phi_i psi_j,
/// centres x_i (repeated), size U, norm M_a M_b, overlap B_a * ||delta_Y||_{U-V}.
Bupu refine(const Bupu& a, const Bupu& b);

struct AxiomReport {
  double max_sum_deviation = 0.0;
  int measured_overlap = 0;
  int declared_overlap = 0;
  double measured_norm = 0.0;
  double declared_norm = 0.0;
  std::size_t support_violations = 0;
  std::size_t samples = 0;
  double sandwich_lower = 0.0;  ///< ||delta_X||_{-U}
  double sandwich_upper = 0.0;  ///< ||delta_X||_{U-U}
  bool sandwich_holds = false;
  int max_center_multiplicity = 1;

  bool passes(double sum_tolerance = 1e-10) const;
};

/// Samples the partition of unity on window ∩ coverage, counts overlaps
/// exactly on the centres, samples sup norms and support leakage on the shell
/// x_i + 1.01 U minus x_i + U.
AxiomReport verify_axioms(const Bupu& b, const Box& window, std::size_t samples, std::uint64_t seed = 1);

/// max_i #{j : (x_i + U) ∩ (x_j + U) != ∅}, counted with repetitions.
int overlap_count(const std::vector<Vec>& centers, const Box& u);

}  // namespace qcdiff
