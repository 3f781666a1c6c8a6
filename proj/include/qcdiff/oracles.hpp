#pragma once

// Brute-force reference computations, deliberately naive: full integer
// boxes, all pairs, all candidate translates. Used to cross-check the
// engines on small randomised instances.

#include "qcdiff/combs.hpp"
#include "qcdiff/lattice.hpp"

#include <vector>

namespace qcdiff::oracle {

/// Integer coordinates of lattice points in the two boxes, found by scanning
/// every tuple with |k|_inf <= ||B^-1||_inf * max|z|_inf + 1. Sorted.
std::vector<std::vector<long long>> enumerate(const CutProjectScheme& scheme, const Box& physical, const Box& internal);

/// Half the minimal Euclidean distance over all pairs (0 with duplicates).
double separation(const std::vector<Vec>& points);

/// max over x in [lo, hi] of the distance to the nearest point, evaluated at
/// the end points and all pairwise midpoints. One-dimensional.
double covering_1d(const std::vector<double>& points, double lo, double hi);

/// sup_x sum_{p in x + K} |w_p| over the candidate translates whose lower
/// corner coordinates each come from some point.
double comb_norm(const std::vector<Vec>& points, const std::vector<double>& abs_weights, const Box& k);

struct Coefficient {
  Vec z;
  cplx value;
};

/// All ordered pairs p - q with w_p conj(w_q) / volume, clustered by
/// single linkage at max-norm distance <= tol. Sorted lexicographically.
std::vector<Coefficient> autocorrelation(const std::vector<Vec>& points, const std::vector<cplx>& weights,
                                         double volume, double tol = kMergeTolerance);

}  // namespace qcdiff::oracle
