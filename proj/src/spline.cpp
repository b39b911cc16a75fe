#include "neverfall/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace neverfall {

NaturalCubicSpline::NaturalCubicSpline(std::vector<double> times, std::vector<double> values)
    : t_(std::move(times)), w_(std::move(values)) {
  const std::size_t n = t_.size();
  if (n < 2 || w_.size() != n)
    throw std::invalid_argument("spline: need >= 2 knots with matching values");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!(t_[i] < t_[i + 1]))
      throw std::invalid_argument("spline: knot times must be strictly increasing");

  // Thomas solve for the knot second derivatives, natural boundary conditions.
  m_.assign(n, 0.0);
  if (n > 2) {
    const std::size_t k = n - 2;  // unknowns M_1 .. M_{n-2}
    std::vector<double> diag(k), upper(k), rhs(k);
    for (std::size_t i = 0; i < k; ++i) {
      const double h0 = t_[i + 1] - t_[i];
      const double h1 = t_[i + 2] - t_[i + 1];
      diag[i] = 2.0 * (h0 + h1);
      upper[i] = h1;
      rhs[i] = 6.0 * ((w_[i + 2] - w_[i + 1]) / h1 - (w_[i + 1] - w_[i]) / h0);
    }
    for (std::size_t i = 1; i < k; ++i) {
      const double lower = t_[i + 1] - t_[i];
      const double f = lower / diag[i - 1];
      diag[i] -= f * upper[i - 1];
      rhs[i] -= f * rhs[i - 1];
    }
    m_[k] = rhs[k - 1] / diag[k - 1];
    for (std::size_t i = k - 1; i >= 1; --i)
      m_[i] = (rhs[i - 1] - upper[i - 1] * m_[i + 1]) / diag[i - 1];
  }

  jerk_cum_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i)
    jerk_cum_[i + 1] = jerk_cum_[i] + std::abs(m_[i + 1] - m_[i]);
}

std::size_t NaturalCubicSpline::segment_of(double t) const {
  if (t <= t_.front()) return 0;
  if (t >= t_.back()) return t_.size() - 2;
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  return static_cast<std::size_t>(it - t_.begin()) - 1;
}

double NaturalCubicSpline::value(double t) const {
  const std::size_t i = segment_of(t);
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h, b = (t - t_[i]) / h;
  return a * w_[i] + b * w_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double NaturalCubicSpline::derivative(double t) const {
  const std::size_t i = segment_of(t);
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h, b = (t - t_[i]) / h;
  return (w_[i + 1] - w_[i]) / h +
         h / 6.0 * ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]);
}

double NaturalCubicSpline::second_derivative(double t) const {
  const std::size_t i = segment_of(t);
  const double h = t_[i + 1] - t_[i];
  const double a = (t_[i + 1] - t) / h, b = (t - t_[i]) / h;
  return a * m_[i] + b * m_[i + 1];
}

double NaturalCubicSpline::third_derivative(double t) const {
  const std::size_t i = segment_of(t);
  return (m_[i + 1] - m_[i]) / (t_[i + 1] - t_[i]);
}

double NaturalCubicSpline::third_abs_integral(double t) const {
  if (t <= t_.front()) return 0.0;
  if (t >= t_.back()) return jerk_cum_.back();
  const std::size_t i = segment_of(t);
  return jerk_cum_[i] + std::abs(third_derivative(t)) * (t - t_[i]);
}

}  // namespace neverfall
