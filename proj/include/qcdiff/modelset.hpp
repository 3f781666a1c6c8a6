#pragma once

// Weighted model sets omega_h = sum_{(x,y) in L} h(y) delta_x and their
// analytic autocorrelation and diffraction.

#include "qcdiff/combs.hpp"
#include "qcdiff/core.hpp"
#include "qcdiff/lattice.hpp"
#include "qcdiff/profile.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qcdiff {

/// amplitude * prod_k p_k(y_k). With no factors it is the constant
/// `amplitude` on the trivial internal space.
class WeightFunction {
 public:
  WeightFunction() = default;
  explicit WeightFunction(std::vector<Profile> factors, cplx amplitude = 1.0);
  static WeightFunction constant(cplx value) { return WeightFunction({}, value); }
  static WeightFunction of(const Profile& p) { return WeightFunction({p}); }

  int dim() const { return static_cast<int>(factors_.size()); }
  const std::vector<Profile>& factors() const { return factors_; }
  cplx amplitude() const { return amplitude_; }
  std::string describe() const;

  cplx operator()(const Vec& y) const;
  /// \int h(y) e^{+2 pi i <eta, y>} dy
  cplx inverse_fourier(const Vec& eta) const;
  /// \int h(y) e^{-2 pi i <xi, y>} dy
  cplx fourier(const Vec& xi) const { return inverse_fourier(-xi); }
  cplx integral() const { return inverse_fourier(Vec::Zero(dim())); }

  bool in_w0() const;
  bool is_real_even() const;
  double sup_norm() const;
  double l1_norm() const;
  /// sup of the transform
  double fourier_sup_norm() const;

  /// Box (around the factor centres) outside of which |h| <= eps.
  Box cutoff_box(double eps) const;
  /// Box outside of which the transform is <= eps in modulus.
  Box fourier_cutoff_box(double eps) const;
  /// \int over the complement of box of |h|; a bound, tight per axis.
  double tail_mass_outside(const Box& box) const;
  /// sup of |h| outside box.
  double sup_outside(const Box& box) const;
  double fourier_sup_outside(const Box& box) const;

  /// h * h~ in closed form; UnsupportedWeightError otherwise.
  WeightFunction autocorrelation() const;
  WeightFunction scaled(cplx a) const { return WeightFunction(factors_, amplitude_ * a); }

 private:
  std::vector<Profile> factors_;
  cplx amplitude_{1.0, 0.0};
};

struct WeightedModelSet {
  CutProjectScheme scheme;
  WeightFunction weight;
};

/// Materialised omega_h on a physical box together with the lifted points.
struct MaterializedModelSet {
  WeightedComb comb;
  std::vector<LatticePoint> points;  ///< aligned with `weights`
  std::vector<cplx> weights;
  Box cutoff;                        ///< internal box that was enumerated
  double dropped_mass_density = 0.0; ///< dens * \int_{outside cutoff} |h|

  /// Points (x, y) in R^(d+m) with weights h(y); differences of the lifted
  /// comb carry their internal part.
  WeightedComb lifted() const;
};

/// Enumerates points with internal part inside the eps-cutoff box of h and
/// weights h(y); zero weights are dropped.
MaterializedModelSet materialize(const WeightedModelSet& ms, const Box& physical_box, double tail_eps = 1e-12,
                                 std::uint64_t cap = kDefaultEnumerationCap);

enum class PeakKind { Amplitudes, Intensities };

struct Peak {
  Vec frequency;
  cplx amplitude{0.0, 0.0};
  double intensity = 0.0;
  Vec internal;  ///< eta, when it comes from a dual-lattice point
};

struct PeakList {
  PeakKind kind = PeakKind::Intensities;
  std::vector<Peak> peaks;
  std::size_t flagged_collisions = 0;
  const Peak* find(const Vec& frequency, double tol = kMergeTolerance) const;
};

/// Dual lattice points (chi, eta) with chi in freq_box and
/// dens^2 |h^(eta)|^2 >= amp_eps; amplitude dens h^(eta), intensity its
/// square modulus. Indicator weights need `allow_non_w0`.
PeakList analytic_diffraction(const WeightedModelSet& ms, const Box& freq_box, double amp_eps,
                              bool allow_non_w0 = false);

/// Same scheme with weight dens * (h * h~).
WeightedModelSet analytic_autocorrelation(const WeightedModelSet& ms);

}  // namespace qcdiff
