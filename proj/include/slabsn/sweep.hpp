#pragma once

#include <Eigen/Dense>
#include <vector>

#include "slabsn/fields.hpp"
#include "slabsn/problem.hpp"
#include "slabsn/quadrature.hpp"

namespace slabsn {

/// Fine mesh prepared for sweeping: cell widths, total cross section per
/// cell and group, and the total (emission) source per cell and ordinate.
struct SweepMesh {
  std::vector<double> width;
  Eigen::MatrixXd sigma_t;  // cells x G
  Eigen::MatrixXd source;   // cells x NG

  std::size_t cells() const { return width.size(); }
};

/// Incoming angular flux at both ends, NG/2 entries each, ordered as the
/// rows kept by select_rows for the inward hemisphere.
struct SweepBoundary {
  Eigen::VectorXd left;   // mu > 0 entering at x_0
  Eigen::VectorXd right;  // mu < 0 entering at x_R
};

struct SweepResult {
  Eigen::MatrixXd psi;          // cell averages, cells x NG
  Eigen::VectorXd exit_left;    // mu < 0 leaving at x_0
  Eigen::VectorXd exit_right;   // mu > 0 leaving at x_R
};

/// One transport sweep in every ordinate with a fixed emission source.
/// Step closure: psi_c = (|mu|/dx psi_in + q) / (|mu|/dx + sigma_t), psi_out = psi_c.
/// Diamond: psi_c = (2|mu|/dx psi_in + q) / (2|mu|/dx + sigma_t), psi_out = 2 psi_c - psi_in.
SweepResult sweep_once(const SweepMesh& mesh, const QuadratureSet& quad, const SweepBoundary& boundary,
                       SweepScheme scheme = SweepScheme::step);

struct SweepSolution {
  Eigen::MatrixXd psi;  // cell averages
  int iterations = 0;
  std::vector<double> change_history;
};

/// Source iteration on the scattering (and, with fission_scale > 0, the
/// shifted fission) source. Stops when the L2 change of the cell-average
/// scalar flux drops below `tolerance`; throws MaxInnerIterations after
/// max_inner sweeps.
class SweepSolver {
 public:
  SweepSolver(const Problem& problem, const QuadratureSet& quad, const FineMesh& mesh,
              double fission_scale = 0.0);

  /// Solves for `external`, starting from `guess` if given (else zero).
  SweepSolution solve(const SourceField& external, double tolerance,
                      const Eigen::MatrixXd* guess = nullptr) const;

  const FineMesh& mesh() const { return mesh_; }
  const QuadratureSet& quadrature() const { return quad_; }
  std::size_t dimension() const { return groups_ * quad_.size(); }

 private:
  void emission(const Eigen::MatrixXd& psi, const Eigen::MatrixXd& phi, Eigen::MatrixXd& q) const;

  QuadratureSet quad_;
  FineMesh mesh_;
  std::size_t groups_;
  std::vector<MaterialXS> materials_;
  std::vector<std::size_t> cell_material_;
  BoundaryCondition left_;
  BoundaryCondition right_;
  double fission_scale_;
  SweepScheme scheme_;
  int max_inner_;
  bool coupled_;
  SweepMesh sweep_mesh_;
};

/// Convenience wrapper: SweepSolver(problem, ...).solve(external, tolerance).
SweepSolution source_iteration(const Problem& problem, const QuadratureSet& quad,
                               const SourceField& external, double tolerance);

}  // namespace slabsn
