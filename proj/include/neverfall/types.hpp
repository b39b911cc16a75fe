#ifndef NEVERFALL_TYPES_HPP
#define NEVERFALL_TYPES_HPP

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace neverfall {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Second-order system  x'' = f(t, x, x')  on R^m.
/// The rhs must be deterministic and finite on the region it is queried in;
/// a non-finite value surfaces as NonFiniteRhs during integration.
struct SecondOrderSystem {
  int dimension = 1;
  std::function<Vec(double t, const Vec& x, const Vec& xdot)> rhs;
};

/// A point of a trajectory: time, position, velocity.
struct TrajectoryState {
  double t = 0.0;
  Vec x;
  Vec xdot;

  bool finite() const {
    return std::isfinite(t) && x.allFinite() && xdot.allFinite();
  }
};

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double initial_step = 1e-3;
  double min_step = 1e-14;
  double max_step = 0.1;
  /// Dense samples strictly inside each accepted step at which stop
  /// predicates are evaluated. Guards against grazing crossings; not
  /// exhaustive by construction.
  int interior_samples = 8;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
      throw std::invalid_argument("IntegratorConfig: tolerances must be positive");
    if (!(0.0 < min_step && min_step <= initial_step && initial_step <= max_step))
      throw std::invalid_argument(
          "IntegratorConfig: need 0 < min_step <= initial_step <= max_step");
    if (interior_samples < 0)
      throw std::invalid_argument("IntegratorConfig: interior_samples must be >= 0");
  }
};

}  // namespace neverfall

#endif
