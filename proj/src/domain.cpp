#include "neverfall/domain.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace neverfall {

namespace {

constexpr double kGradientFloor = 1e-12;

// Portable uniform double in [0, 1) from the raw mt19937_64 stream; the
// standard distributions are implementation-defined sequences, and reports
// are required to be byte-identical across runs.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec gaussian_vector(std::mt19937_64& rng, int n) {
  Vec v(n);
  int i = 0;
  while (i < n) {
    const double u1 = std::max(uniform01(rng), 1e-300);
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    v[i++] = r * std::cos(2.0 * M_PI * u2);
    if (i < n) v[i++] = r * std::sin(2.0 * M_PI * u2);
  }
  return v;
}

}  // namespace

SublevelDomain quadratic_domain(int dimension, double level) {
  if (dimension < 1) throw std::invalid_argument("quadratic_domain: dimension must be >= 1");
  if (!(level > 0.0)) throw std::invalid_argument("quadratic_domain: level must be positive");
  SublevelDomain dom;
  dom.dimension = dimension;
  dom.level = level;
  dom.value = [](const Vec& x) { return x.squaredNorm(); };
  dom.gradient = [](const Vec& x) { return Vec(2.0 * x); };
  dom.hessian = [dimension](const Vec&) {
    return Mat(2.0 * Mat::Identity(dimension, dimension));
  };
  return dom;
}

Membership membership(const SublevelDomain& dom, const Vec& x) {
  if (!x.allFinite()) throw std::invalid_argument("membership: point is not finite");
  const double g = dom.value(x) - dom.level;
  if (std::abs(g) <= dom.boundary_tol) return Membership::Boundary;
  return g < 0.0 ? Membership::Interior : Membership::Exterior;
}

BoundaryGrid make_boundary_grid(const SublevelDomain& dom, std::vector<Vec> points) {
  if (points.empty()) throw std::invalid_argument("boundary grid: no points");
  for (const Vec& p : points) {
    const double off = std::abs(dom.value(p) - dom.level);
    if (off > dom.boundary_tol)
      throw std::invalid_argument("boundary grid: |F - c| = " + std::to_string(off) +
                                  " exceeds the boundary tolerance");
  }
  return BoundaryGrid{std::move(points)};
}

std::pair<double, double> domain_endpoints_1d(const SublevelDomain& dom) {
  if (dom.dimension != 1)
    throw std::invalid_argument("domain_endpoints_1d: domain is not one-dimensional");
  const auto value1 = [&dom](double x) {
    Vec p(1);
    p[0] = x;
    return dom.value(p) - dom.level;
  };
  if (!(value1(0.0) < 0.0))
    throw std::invalid_argument("domain_endpoints_1d: 0 must lie inside D_c");

  const auto edge = [&](double dir) {
    double inner = 0.0, outer = dir;
    int guard = 0;
    while (value1(outer) < 0.0) {
      inner = outer;
      outer *= 2.0;
      if (++guard > 60)
        throw std::invalid_argument("domain_endpoints_1d: boundary not found (unbounded D_c?)");
    }
    for (int i = 0; i < 200 && std::abs(outer - inner) > 1e-15 * std::max(1.0, std::abs(outer));
         ++i) {
      const double mid = 0.5 * (inner + outer);
      (value1(mid) < 0.0 ? inner : outer) = mid;
    }
    return 0.5 * (inner + outer);
  };
  return {edge(-1.0), edge(1.0)};
}

Mat tangent_basis(const SublevelDomain& dom, const Vec& x) {
  const int m = dom.dimension;
  const Vec g = dom.gradient(x);
  if (g.norm() <= kGradientFloor) throw DegenerateGradient();
  if (m == 1) return Mat(1, 0);

  // Householder QR of the gradient: columns 2..m of Q span the complement.
  Eigen::HouseholderQR<Mat> qr(g);
  const Mat q = qr.householderQ();
  Mat basis = q.rightCols(m - 1);
  // Orientation/roundoff cleanup: project out any residual gradient component.
  const Vec unit = g.normalized();
  for (int j = 0; j < basis.cols(); ++j) {
    basis.col(j) -= unit * unit.dot(basis.col(j));
    basis.col(j).normalize();
  }
  return basis;
}

InequalityReport check_boundary_inequality(const SublevelDomain& dom,
                                           const SecondOrderSystem& system,
                                           const BoundaryGrid& grid,
                                           const std::vector<double>& t_samples,
                                           double xi_radius, int xi_samples_per_point) {
  if (grid.points.empty()) throw std::invalid_argument("inequality check: empty grid");
  if (t_samples.empty()) throw std::invalid_argument("inequality check: no time samples");
  if (!(xi_radius > 0.0)) throw std::invalid_argument("inequality check: xi_radius must be > 0");

  InequalityReport report;
  std::mt19937_64 rng(0x5eedULL);

  for (const Vec& x : grid.points) {
    const Vec grad = dom.gradient(x);
    const Mat hess = dom.hessian(x);
    const Mat basis = tangent_basis(dom, x);  // throws DegenerateGradient
    const int tdim = static_cast<int>(basis.cols());

    // Tangent sample set: xi = 0 always, then spheres of radii
    // {1/4, 1/2, 3/4, 1} * xi_radius.
    std::vector<Vec> xis;
    xis.push_back(Vec::Zero(dom.dimension));
    if (tdim >= 1) {
      std::vector<Vec> dirs;
      if (tdim == 1) {
        dirs.push_back(basis.col(0));
        dirs.push_back(-basis.col(0));
      } else {
        for (int k = 0; k < std::max(2, xi_samples_per_point); ++k) {
          Vec raw = gaussian_vector(rng, tdim);
          if (raw.norm() < 1e-12) raw[0] = 1.0;
          dirs.push_back(basis * raw.normalized());
        }
      }
      for (const double scale : {0.25, 0.5, 0.75, 1.0})
        for (const Vec& d : dirs) xis.push_back(scale * xi_radius * d);
    }

    double min_eig = std::numeric_limits<double>::infinity();
    if (tdim >= 1) {
      const Mat restricted = basis.transpose() * hess * basis;
      Eigen::SelfAdjointEigenSolver<Mat> eig(restricted);
      min_eig = eig.eigenvalues().minCoeff();
    }
    report.tangent_hessian_min_eigs.push_back(min_eig);
    report.min_tangent_hessian_eig = std::min(report.min_tangent_hessian_eig, min_eig);

    for (const double t : t_samples) {
      for (const Vec& xi : xis) {
        const Vec accel = system.rhs(t, x, xi);
        const double lhs = grad.dot(accel) + xi.dot(hess * xi);
        if (lhs < report.margin) {
          report.margin = lhs;
          report.worst_time = t;
          report.worst_point = x;
          report.worst_xi = xi;
        }
      }
    }
  }

  report.pass = report.margin > 0.0 && report.min_tangent_hessian_eig >= -1e-10;
  return report;
}

InitialFieldReport check_initial_field(const SublevelDomain& dom, const VectorField& v,
                                       const BoundaryGrid& grid) {
  if (grid.points.empty()) throw std::invalid_argument("initial field check: empty grid");
  InitialFieldReport report;
  for (const Vec& x : grid.points) {
    const double val = dom.gradient(x).dot(v(x));
    if (val < report.min_value) {
      report.min_value = val;
      report.worst_point = x;
    }
  }
  report.pass = report.min_value >= -1e-10;
  return report;
}

DomainConsistencyReport validate_domain(const SublevelDomain& dom,
                                        const std::vector<Vec>& interior_samples,
                                        const BoundaryGrid& grid) {
  DomainConsistencyReport report;
  const int m = dom.dimension;

  for (const Vec& x : interior_samples) {
    const Vec grad = dom.gradient(x);
    const Mat hess = dom.hessian(x);
    const double grad_scale = std::max(grad.norm(), 1e-6);
    const double hess_scale = std::max(hess.norm(), 1e-6);
    for (int j = 0; j < m; ++j) {
      const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd_grad = (dom.value(xp) - dom.value(xm)) / (2.0 * h);
      report.max_gradient_rel_err =
          std::max(report.max_gradient_rel_err, std::abs(fd_grad - grad[j]) / grad_scale);
      const Vec fd_hess_col = (dom.gradient(xp) - dom.gradient(xm)) / (2.0 * h);
      report.max_hessian_rel_err = std::max(
          report.max_hessian_rel_err, (fd_hess_col - Vec(hess.col(j))).norm() / hess_scale);
    }
  }

  for (const Vec& x : grid.points)
    report.min_boundary_gradient_norm =
        std::min(report.min_boundary_gradient_norm, dom.gradient(x).norm());

  report.pass = report.max_gradient_rel_err < 1e-5 && report.max_hessian_rel_err < 1e-5 &&
                report.min_boundary_gradient_norm > kGradientFloor;
  return report;
}

}  // namespace neverfall
