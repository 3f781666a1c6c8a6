#pragma once

// Cut-and-project schemes: a full-rank lattice in R^(d+m) whose first d
// coordinates are physical and the last m internal. Characters are
// x -> exp(2 pi i <k, x>), so the dual lattice is generated by the columns of
// the inverse transpose of the basis.

#include "qcdiff/core.hpp"

#include <cstdint>
#include <vector>

namespace qcdiff {

/// Inverse transpose of a square basis; RankError if singular.
Mat dual_lattice(const Mat& basis);

class CutProjectScheme {
 public:
  /// basis columns generate the lattice; rows 0..d-1 are physical.
  CutProjectScheme(int d, int m, Mat basis);

  /// Z^(d+m) with the identity basis.
  static CutProjectScheme integer(int d, int m);
  /// d = m = 1, columns (1, 1) and (tau, -1/tau). Density 1/sqrt(5).
  static CutProjectScheme golden();

  int physical_dim() const { return d_; }
  int internal_dim() const { return m_; }
  int dim() const { return d_ + m_; }
  const Mat& basis() const { return basis_; }
  const Mat& dual_basis() const { return dual_basis_; }
  double density() const { return density_; }

  /// Same split, lattice replaced by its dual.
  CutProjectScheme dual() const;
  /// Same split, basis multiplied by a scalar.
  CutProjectScheme scaled(double factor) const;

  Vec physical(const Vec& z) const { return z.head(d_); }
  Vec internal(const Vec& z) const { return z.tail(m_); }
  Vec point(const std::vector<long long>& coords) const;

 private:
  int d_;
  int m_;
  Mat basis_;
  Mat dual_basis_;
  double density_;
};

struct LatticePoint {
  Vec x;                          ///< physical part
  Vec y;                          ///< internal part
  std::vector<long long> coords;  ///< integer coordinates in the basis
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 1'000'000'000ULL;

/// All lattice points with physical part in physical_box and internal part in
/// internal_box (closed boxes), ordered lexicographically by integer
/// coordinates. The integer bounding box of the preimage is scanned; the
/// CapacityError fires when it holds more than `cap` candidate tuples.
std::vector<LatticePoint> enumerate_points(const CutProjectScheme& scheme, const Box& physical_box,
                                           const Box& internal_box,
                                           std::uint64_t cap = kDefaultEnumerationCap);

/// Same as enumerate_points but only counts.
std::size_t count_points(const CutProjectScheme& scheme, const Box& physical_box,
                         const Box& internal_box, std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace qcdiff
