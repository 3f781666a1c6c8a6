#pragma once

// Empirical side of the theory: van Hove averaging, Fourier-Bohr
// coefficients, finite autocorrelations and their transforms, and the
// verification engines (Poisson summation, density formula, Wiener diagram).

#include "qcdiff/combs.hpp"
#include "qcdiff/core.hpp"
#include "qcdiff/lattice.hpp"
#include "qcdiff/modelset.hpp"

#include <cstdint>
#include <vector>

namespace qcdiff {

/// Centred cubes A_n = [-L_n, L_n]^d, n = 1..max_n, strictly increasing L_n.
class VanHoveSequence {
 public:
  VanHoveSequence(int dim, std::vector<double> half_widths);
  /// L_n = n * l0
  static VanHoveSequence arithmetic(int dim, double l0, int max_n);
  /// L_n = l0 * ratio^n
  static VanHoveSequence geometric(int dim, double l0, double ratio, int max_n);

  int dim() const { return dim_; }
  int max_n() const { return static_cast<int>(half_widths_.size()); }
  const std::vector<double>& half_widths() const { return half_widths_; }
  double half_width(int n) const;
  Box box(int n) const;
  Box box(int n, const Vec& shift) const;
  /// vol(d^K A_n) / vol(A_n) for the cube K' of half widths |c_K| + r_K
  /// containing K and -K; exact when K is centred.
  double boundary_ratio(int n, const Box& k) const;

 private:
  int dim_;
  std::vector<double> half_widths_;
};

struct FourierBohrSeries {
  Vec chi;
  std::vector<double> half_widths;
  std::vector<cplx> values;  ///< (1/vol A_n) sum_{p in A_n} w_p e^{-2 pi i <chi, p>}
  cplx extrapolated{0.0, 0.0};
  double error_bar = 0.0;    ///< |a_max - a_{max-1}|
};

/// One series per frequency. GeometryError unless shift + A_max lies in the
/// comb window.
std::vector<FourierBohrSeries> fourier_bohr(const WeightedComb& omega, const std::vector<Vec>& chis,
                                            const VanHoveSequence& seq, const Vec& shift);
FourierBohrSeries fourier_bohr(const WeightedComb& omega, const Vec& chi, const VanHoveSequence& seq);

struct UniformityReport {
  std::vector<Vec> shifts;
  std::vector<FourierBohrSeries> series;  ///< per shift
  std::vector<double> deviation;          ///< per n: max_t |a_n(t) - a_n(0)|
  double max_deviation = 0.0;             ///< at max_n
};

UniformityReport translate_uniformity_check(const WeightedComb& omega, const Vec& chi, const VanHoveSequence& seq,
                                            const std::vector<Vec>& shifts);

/// Fejer taper radius R = coefficient * L^exponent (at least 1).
struct TaperRule {
  double coefficient = 1.0;
  double exponent = 0.5;
  double radius(double half_width) const;
};

/// Exact transform of the finite autocorrelation at chi, Fejer-averaged:
/// R^-d sum_z gamma({z}) prod_k (1 - |z_k| / R)_+ e^{-2 pi i <chi, z>}.
double tapered_transform(const WeightedComb& gamma, const Vec& chi, double taper_radius);

struct EmpiricalStage {
  int n = 0;
  double half_width = 0.0;
  double taper_radius = 0.0;
  std::vector<double> route_a;  ///< |a_n(chi)|^2
  std::vector<double> route_b;  ///< tapered transform of gamma_n
  double max_gap = 0.0;
};

struct EmpiricalDiffraction {
  std::vector<Vec> frequencies;
  std::vector<EmpiricalStage> stages;
};

EmpiricalDiffraction empirical_diffraction(const WeightedComb& omega, const VanHoveSequence& seq,
                                           const std::vector<Vec>& freqs, const TaperRule& taper = {});

struct PsfReport {
  double radius = 0.0;
  cplx lhs{0.0, 0.0};
  cplx rhs{0.0, 0.0};
  double residual = 0.0;
  double tail_bound = 0.0;      ///< both truncated tails
  double roundoff_bound = 0.0;
  std::size_t lhs_terms = 0;
  std::size_t rhs_terms = 0;
  bool pass = false;            ///< residual <= 10 (tail + roundoff)
};

/// sum_{(x,y) in L, |x|,|y| <= r} g(x) h(y) against
/// dens(L) sum_{(chi,eta) in L°, |chi|,|eta| <= r} g^(chi) h^(eta), with ^ the
/// inverse transform.
PsfReport psf_verify(const CutProjectScheme& scheme, const WeightFunction& g, const WeightFunction& h, double radius);

struct DensityReport {
  double target = 0.0;  ///< dens(L) \int h
  std::vector<double> half_widths;
  std::vector<Vec> shifts;
  std::vector<std::vector<double>> ratios;  ///< [shift][n], real part of omega(t + A_n)/vol
  std::vector<double> residual;             ///< per n, max over shifts of |ratio - target|
  std::vector<double> shift_deviation;      ///< per n, max_t |ratio(t) - ratio(first shift)|
  double dropped_mass_density = 0.0;
};

DensityReport density_formula_check(const WeightedModelSet& ms, const VanHoveSequence& seq,
                                    const std::vector<Vec>& shifts, double tail_eps = 1e-12);

/// Off-peak frequencies drawn uniformly from `box`, rejecting any within
/// max(min_radius, factor * |amplitude|) of a reference peak.
struct ExclusionRule {
  double min_radius = 1e-3;
  double amplitude_factor = 0.1;
  double amplitude_floor = 1e-5;  ///< peaks weaker than this are ignored
};

std::vector<Vec> off_peak_frequencies(const PeakList& reference, const Box& box, std::size_t count, std::uint64_t seed,
                                      const ExclusionRule& rule);

struct WienerDiagramOptions {
  Box freq_box = Box::interval(-3.0, 3.0);
  double peak_eps = 1e-4;            ///< minimum analytic intensity checked
  double autocorr_cutoff = 5.0;      ///< |x_z| range of compared coefficients
  double autocorr_floor = 1e-8;      ///< analytic coefficients below are not enumerated
  std::size_t off_peak_count = 20;
  std::uint64_t seed = 2024;
  ExclusionRule exclusion{};
  double tail_eps = 1e-12;
  TaperRule taper{};
  double autocorr_tol = 0.02;
  double peak_tol = 0.02;
  double off_peak_tol = 0.01;
  bool allow_non_w0 = false;
};

struct WienerDiagramReport {
  double half_width = 0.0;
  std::size_t points = 0;
  std::size_t autocorr_coefficients = 0;
  double autocorr_gap = 0.0;  ///< max |gamma_n({z}) - dens (h*h~)(y_z)|
  std::size_t peaks = 0;
  double peak_gap = 0.0;      ///< max | |a_chi|^2 - dens^2 |h^(eta)|^2 |
  double amplitude_gap = 0.0; ///< max |a_chi - dens h^(eta)|
  double route_gap = 0.0;     ///< max | |a_chi|^2 - tapered gamma^_n(chi) | at the peaks
  std::vector<Vec> off_peak_frequencies;
  double off_peak_max = 0.0;  ///< max |a_chi|^2 over the off-peak battery
  bool autocorr_ok = false;
  bool peak_ok = false;
  bool off_peak_ok = false;
  bool commutes() const { return autocorr_ok && peak_ok && off_peak_ok; }
};

/// Compares the empirical corners on A = [-L, L]^d against the analytic
/// autocorrelation and diffraction of the model set.
WienerDiagramReport wiener_diagram_report(const WeightedModelSet& ms, double half_width,
                                          const WienerDiagramOptions& opt = {});

struct CommutativityReport {
  Vec chi;
  double half_width = 0.0;
  double taper_radius = 0.0;
  cplx amplitude{0.0, 0.0};  ///< a_chi on A
  double route_a = 0.0;      ///< |a_chi|^2
  double route_b = 0.0;      ///< tapered transform of gamma
  double gamma_at_zero = 0.0;
  double gap = 0.0;
  bool commutes(double tol) const { return gap <= tol; }
};

/// Route A against route B for an arbitrary comb on A = [-L, L]^d.
CommutativityReport comb_commutativity(const WeightedComb& omega, double half_width, const Vec& chi,
                                       const TaperRule& taper = {});

// ---------------------------------------------------------------------------
// positive definiteness of finite autocorrelations

/// Closed-form test bumps f (tensor products) paired with f * f~.
struct TestBump {
  WeightFunction f;
  WeightFunction autocorrelation;
};

/// Gaussians, modulated Gaussians and B-splines with fixed-seed parameters.
std::vector<TestBump> bump_battery(int dim, std::size_t count = 20, std::uint64_t seed = 11);

struct PositiveDefinitenessReport {
  std::size_t tests = 0;
  double min_real = 0.0;        ///< min_f Re gamma(f * f~) / scale_f
  double max_imag = 0.0;        ///< max_f |Im gamma(f * f~)| / scale_f
  bool hermitian_exact = false; ///< gamma({-z}) == conj gamma({z}) bitwise
  bool passes(double tol = 1e-10) const { return hermitian_exact && min_real >= -tol; }
};

PositiveDefinitenessReport positive_definiteness(const WeightedComb& gamma, const std::vector<TestBump>& battery);

bool hermitian_exact(const WeightedComb& gamma);

}  // namespace qcdiff
