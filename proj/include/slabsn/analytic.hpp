#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "slabsn/fields.hpp"
#include "slabsn/problem.hpp"
#include "slabsn/quadrature.hpp"
#include "slabsn/spectral.hpp"

namespace slabsn {

enum class Hemisphere { negative, positive };

/// Keeps the rows g*N + n whose ordinate mu_n lies in the given hemisphere,
/// in their original order.
Eigen::MatrixXd select_rows(const Eigen::MatrixXd& matrix, const QuadratureSet& quad,
                            Hemisphere hemisphere);

using SpectrumPtr = std::shared_ptr<const BlockSpectrum>;

/// One block diagonalization per distinct material, shared by all regions
/// made of it.
std::vector<SpectrumPtr> region_spectra(const Problem& problem, const QuadratureSet& quad,
                                        double fission_scale);

/// Boundary + interface-continuity system for the expansion coefficients.
struct GlobalSystem {
  Eigen::MatrixXd matrix;  // NGR x NGR
  Eigen::VectorXd rhs;
  std::size_t regions = 0;
  std::size_t dimension = 0;  // NG
};

/// Expansion coefficients and in-region particular solutions of one solve.
struct RegionSolution {
  std::size_t region = 0;
  double x_left = 0.0;
  double x_right = 0.0;
  Eigen::VectorXd alpha;
  SpectrumPtr spectrum;
};

struct FixedSourceSolution {
  std::vector<RegionSolution> regions;
  /// Modal particular solution at every fine-mesh edge of each region,
  /// (cells_in_region + 1) x NG.
  std::vector<Eigen::MatrixXd> particular_at_edges;
  /// Modal source P^{-1} Q/mu per fine cell, cells x NG.
  Eigen::MatrixXd modal_source;
};

/// Analytic fixed-source solver on a fixed geometry. Inside region r the
/// angular flux is Psi(x) = P_r X(x) with
///   X_k(x) = Gamma_k(x - o_k) alpha_k + integral_{o_k}^{x} Gamma_k(x - xi) (P_r^{-1} Q/mu)_k dxi,
/// where the origin o_k of each block is the region's left edge when
/// Re(lambda_k) <= 0 and its right edge otherwise. Every exponential is
/// then bounded by one, so thick regions and high orders stay stable.
///
/// The boundary/continuity matrix depends only on geometry and spectra and
/// is factorized once; each solve assembles a new right-hand side.
class AnalyticSolver {
 public:
  AnalyticSolver(const SlabGeometry& geometry, std::vector<SpectrumPtr> spectra,
                 const QuadratureSet& quad, const FineMesh& mesh);

  /// Convenience: builds spectra for the problem's materials.
  static AnalyticSolver from_problem(const Problem& problem, const QuadratureSet& quad,
                                     const FineMesh& mesh, double fission_scale);

  const GlobalSystem& matrix_only() const { return system_; }
  GlobalSystem assemble(const SourceField& source) const;
  FixedSourceSolution solve(const SourceField& source) const;

  /// Flux at arbitrary points; at a region interface the left region is used.
  FluxField evaluate(const FixedSourceSolution& solution, std::span<const double> points) const;
  /// Flux at x using region r's expansion (x must lie in region r).
  Eigen::VectorXd evaluate_in_region(const FixedSourceSolution& solution, std::size_t region,
                                     double x) const;
  /// Flux at fine-cell centers; the fast path used by power iteration.
  FluxField evaluate_centers(const FixedSourceSolution& solution) const;

  const FineMesh& mesh() const { return mesh_; }
  const QuadratureSet& quadrature() const { return quad_; }
  std::size_t dimension() const { return dim_; }
  std::size_t groups() const { return dim_ / quad_.size(); }

 private:
  struct Region {
    SpectrumPtr spectrum;
    double x_left = 0.0;
    double x_right = 0.0;
    std::size_t first_cell = 0;
    std::size_t cell_count = 0;
    std::vector<bool> right_anchored;  // per block
    // Per cell and block: one-cell propagator and source integral in the
    // marching direction of that block, and the same over half a cell
    // towards the center, plus Gamma~ at the center. Index cell * blocks + k.
    std::vector<std::complex<double>> step, step_src, half, half_src, center_gamma;
  };

  std::vector<std::complex<double>> anchored_gamma(const Region& region, double x) const;
  Eigen::MatrixXd basis_at(const Region& region, double x) const;  // P Gamma~(x)
  Eigen::MatrixXd modal_source(const SourceField& source) const;
  std::vector<Eigen::MatrixXd> march(const Eigen::MatrixXd& theta) const;
  Eigen::VectorXd rhs(const std::vector<Eigen::MatrixXd>& particular) const;
  std::size_t locate_region(double x) const;

  SlabGeometry geometry_;
  QuadratureSet quad_;
  FineMesh mesh_;
  std::size_t dim_ = 0;
  std::vector<Region> regions_;
  Eigen::VectorXd inv_mu_;  // 1/mu per row g*N + n
  GlobalSystem system_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Boundary/continuity system for a given source.
GlobalSystem assemble_global_system(const SlabGeometry& geometry, const std::vector<SpectrumPtr>& spectra,
                                    const SourceField& source, const QuadratureSet& quad);

/// Dense LU with partial pivoting. Throws SingularSystem when the reciprocal
/// condition is below 1e-14 or the residual check fails.
std::vector<Eigen::VectorXd> solve_alpha(const GlobalSystem& system);

/// Builds the problem's fixed-source operator (no fission in A), solves for
/// the given source and returns the flux at fine-cell centers.
FluxField fixed_source_solve(const Problem& problem, const SourceField& source);

}  // namespace slabsn
