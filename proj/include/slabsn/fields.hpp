#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "slabsn/problem.hpp"
#include "slabsn/quadrature.hpp"

namespace slabsn {

/// Piecewise-constant angular source: values(m, g*N + n) on fine cell m.
struct SourceField {
  FineMesh mesh;
  Eigen::MatrixXd values;

  std::size_t cells() const { return mesh.cells(); }
  void validate(std::size_t dimension) const;
};

/// Angular and scalar flux sampled at a set of points.
struct FluxField {
  std::vector<double> points;
  Eigen::MatrixXd psi;  // points x NG
  Eigen::MatrixXd phi;  // points x G
  std::size_t groups = 0;
  std::size_t ordinates = 0;
};

/// phi(p, g) = sum_n w_n psi(p, g*N + n)
Eigen::MatrixXd scalar_flux(const Eigen::MatrixXd& psi, const QuadratureSet& quad, std::size_t groups);

FluxField make_flux_field(std::vector<double> points, Eigen::MatrixXd psi, const QuadratureSet& quad,
                          std::size_t groups);

/// Isotropic source with the same value in every group and ordinate,
/// proportional to |x| at cell centers (abs_x) or constant (flat).
SourceField initial_source(const FineMesh& mesh, std::size_t dimension, InitialSource shape,
                           double scale = 1.0);

}  // namespace slabsn
