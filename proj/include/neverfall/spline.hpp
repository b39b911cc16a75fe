#ifndef NEVERFALL_SPLINE_HPP
#define NEVERFALL_SPLINE_HPP

#include <cstddef>
#include <vector>

namespace neverfall {

/// Natural cubic spline through (t_i, w_i). C2 overall; the second derivative
/// is piecewise linear and the third piecewise constant, which is exactly the
/// smoothness the train-profile machinery needs.
class NaturalCubicSpline {
 public:
  /// Requires >= 2 knots and strictly increasing times.
  NaturalCubicSpline(std::vector<double> times, std::vector<double> values);

  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
  double third_derivative(double t) const;  // piecewise constant

  /// Exact cumulative integral of |w'''| from t_begin to t (clamped).
  double third_abs_integral(double t) const;

 private:
  std::size_t segment_of(double t) const;

  std::vector<double> t_, w_;
  std::vector<double> m_;        // second derivatives at the knots, natural BCs
  std::vector<double> jerk_cum_; // cumulative integral of |w'''| up to each knot
};

}  // namespace neverfall

#endif
