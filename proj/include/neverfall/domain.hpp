#ifndef NEVERFALL_DOMAIN_HPP
#define NEVERFALL_DOMAIN_HPP

#include <limits>
#include <vector>

#include "neverfall/types.hpp"

namespace neverfall {

/// Raised where the boundary gradient (numerically) vanishes; the level set
/// is not a manifold there and every boundary computation loses meaning.
struct DegenerateGradient : std::runtime_error {
  DegenerateGradient() : std::runtime_error("gradient vanishes at a boundary point") {}
};

/// The sublevel domain D_c = {F < c} with its boundary {F = c}.
struct SublevelDomain {
  int dimension = 1;
  std::function<double(const Vec&)> value;    // F
  std::function<Vec(const Vec&)> gradient;    // dF
  std::function<Mat(const Vec&)> hessian;     // d2F, symmetric
  double level = 0.0;                         // c
  double boundary_tol = 1e-10;                // band half-width on |F - c|
};

/// D_c from F(x) = |x|^2 with level c > 0; covers both worked models and the
/// custom 1-D scenario family.
SublevelDomain quadratic_domain(int dimension, double level);

enum class Membership { Interior, Boundary, Exterior };

Membership membership(const SublevelDomain& dom, const Vec& x);

/// Boundary sample points, each with |F(x) - c| within the domain's boundary
/// tolerance (validated at construction).
struct BoundaryGrid {
  std::vector<Vec> points;
};

BoundaryGrid make_boundary_grid(const SublevelDomain& dom, std::vector<Vec> points);

/// The two endpoints of a 1-D domain, located by expanding search plus
/// bisection from the interior point 0.
std::pair<double, double> domain_endpoints_1d(const SublevelDomain& dom);

/// Orthonormal basis of the tangent space {xi : dF(x)[xi] = 0} at a boundary
/// point, as the columns of an m x (m-1) matrix. Empty (m x 0) for m = 1.
Mat tangent_basis(const SublevelDomain& dom, const Vec& x);

/// Result of sampling the boundary inequality
///   dF(x)[f(t, x, xi)] + d2F(x)[xi, xi] > 0
/// over the grid, the time samples, and tangent vectors up to xi_radius.
/// The restricted-Hessian minimum eigenvalue covers the unbounded-|xi| tail
/// (the quadratic term dominates there); +inf when m = 1 (no tangent
/// directions, the check is vacuous).
struct InequalityReport {
  double margin = std::numeric_limits<double>::infinity();
  double worst_time = 0.0;
  Vec worst_point;
  Vec worst_xi;
  std::vector<double> tangent_hessian_min_eigs;
  double min_tangent_hessian_eig = std::numeric_limits<double>::infinity();
  bool pass = false;
};

InequalityReport check_boundary_inequality(const SublevelDomain& dom,
                                           const SecondOrderSystem& system,
                                           const BoundaryGrid& grid,
                                           const std::vector<double>& t_samples,
                                           double xi_radius, int xi_samples_per_point);

using VectorField = std::function<Vec(const Vec&)>;

/// min over the grid of dF(x)[v(x)]; the theorem wants >= 0 on the boundary.
struct InitialFieldReport {
  double min_value = std::numeric_limits<double>::infinity();
  Vec worst_point;
  bool pass = false;
};

InitialFieldReport check_initial_field(const SublevelDomain& dom, const VectorField& v,
                                       const BoundaryGrid& grid);

/// Finite-difference consistency of the supplied gradient/Hessian with F,
/// plus the nondegeneracy |dF| > 0 on the boundary grid.
struct DomainConsistencyReport {
  double max_gradient_rel_err = 0.0;
  double max_hessian_rel_err = 0.0;
  double min_boundary_gradient_norm = std::numeric_limits<double>::infinity();
  bool pass = false;
};

DomainConsistencyReport validate_domain(const SublevelDomain& dom,
                                        const std::vector<Vec>& interior_samples,
                                        const BoundaryGrid& grid);

}  // namespace neverfall

#endif
