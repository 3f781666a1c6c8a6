#pragma once

// Shared vocabulary: vectors, axis-aligned boxes, error types and
// compensated summation.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace qcdiff {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Golden mean (1+sqrt 5)/2.
inline const double kTau = 0.5 * (1.0 + std::sqrt(5.0));

// ---------------------------------------------------------------------------
// errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class RankError : public Error {
 public:
  using Error::Error;
};
class CapacityError : public Error {
 public:
  using Error::Error;
};
class ParameterError : public Error {
 public:
  using Error::Error;
};
class GeometryError : public Error {
 public:
  using Error::Error;
};
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double boundary_mass)
      : Error(what), boundary_mass_(boundary_mass) {}
  double boundary_mass() const noexcept { return boundary_mass_; }

 private:
  double boundary_mass_;
};
class UnsupportedWeightError : public Error {
 public:
  using Error::Error;
};
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Box

/// Closed axis-aligned box prod [c_i - r_i, c_i + r_i]. A zero-dimensional
/// box is the one-point space; it contains the empty vector and has volume 1.
class Box {
 public:
  Box() = default;
  Box(Vec center, Vec half_widths);

  static Box interval(double lo, double hi);
  static Box cube(int dim, double half_width);
  static Box from_bounds(const Vec& lo, const Vec& hi);
  static Box empty_space() { return Box(Vec(0), Vec(0)); }

  int dim() const { return static_cast<int>(center_.size()); }
  const Vec& center() const { return center_; }
  const Vec& half_widths() const { return half_widths_; }
  Vec lower() const { return center_ - half_widths_; }
  Vec upper() const { return center_ + half_widths_; }
  double volume() const;
  /// Boundary surface measure, (d-1)-dimensional.
  double surface() const;

  bool contains(const Vec& p) const;
  bool contains(const Vec& p, double slack) const;
  bool contains(const Box& other) const;
  bool intersects(const Box& other) const;
  /// Interiors intersect (boxes touching along a face do not overlap).
  bool overlaps(const Box& other) const;

  Box translated(const Vec& t) const { return Box(center_ + t, half_widths_); }
  Box scaled(double factor) const { return Box(center_, half_widths_ * factor); }
  /// Minkowski sum with a zero-centred box.
  Box grown(const Box& u) const;
  /// Erosion by a zero-centred box; throws GeometryError if nothing is left.
  Box shrunk(const Box& u) const;
  /// {a - b : a in this, b in other}
  Box difference(const Box& other) const;
  Box reflected() const { return Box(-center_, half_widths_); }
  Box product(const Box& other) const;

 private:
  Vec center_;
  Vec half_widths_;
};

// ---------------------------------------------------------------------------
// compensated (Neumaier) summation

template <class T>
class CompensatedSum {
 public:
  void add(T x) {
    T t = sum_ + x;
    if constexpr (std::is_same_v<T, double>) {
      if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
      else
        comp_ += (x - t) + sum_;
    } else {
      comp_ += component_error(sum_, x, t);
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(T x) {
    add(x);
    return *this;
  }
  T value() const { return sum_ + comp_; }

 private:
  static cplx component_error(cplx a, cplx b, cplx t) {
    auto err = [](double s, double x, double u) {
      return std::abs(s) >= std::abs(x) ? (s - u) + x : (x - u) + s;
    };
    return {err(a.real(), b.real(), t.real()), err(a.imag(), b.imag(), t.imag())};
  }
  T sum_{};
  T comp_{};
};

/// Lexicographic strict ordering on equally sized vectors.
bool lex_less(const Vec& a, const Vec& b);

double max_abs_diff(const Vec& a, const Vec& b);

}  // namespace qcdiff
