#pragma once

#include <optional>
#include <vector>

#include "slabsn/fields.hpp"
#include "slabsn/problem.hpp"

namespace slabsn {

struct IterationRecord {
  int iteration = 0;
  double k = 0.0;
  double flux_change = 0.0;  // NaN for the first solve
  double seconds = 0.0;      // cumulative, excluding setup
};

struct EigenResult {
  double k_eff = 0.0;
  int iterations = 0;
  FluxField flux;  // at fine-cell centers (analytic) or cell averages (sweep)
  std::vector<IterationRecord> history;
  SolverKind solver = SolverKind::analytic;
  std::optional<double> ke;
  double tolerance = 0.0;
  int sn_order = 0;
  std::size_t mesh_cells = 0;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  long inner_sweeps = 0;  // sweep solver only
};

/// Isotropic fission emission (1/k - 1/k_e) chi_g / 2 * sum_g' nuSigma_f,g' phi_g'
/// per cell, from scalar fluxes sampled once per fine cell. Throws
/// ShiftAtEigenvalue when |1/k - 1/k_e| < 1e-12.
SourceField fission_source(const FluxField& flux, const FineMesh& mesh, const Problem& problem, double k,
                           std::optional<double> ke);

/// sum over cells of dx * sum_g nuSigma_f,g phi_g
double fission_integral(const FluxField& flux, const FineMesh& mesh, const Problem& problem);

/// Without shift k_new = k * new/prev. With shift
/// 1/k_new = 1/k_e + (1/k - 1/k_e) * prev/new. Throws NonpositiveIntegral.
double update_keff(double k, std::optional<double> ke, double prev_integral, double new_integral);

/// Scales fluxes so that sum_g integral phi_g dx = 1 (midpoint rule).
/// Throws ZeroFlux.
FluxField normalize(const FluxField& flux, const FineMesh& mesh);

struct PowerIterationOptions {
  double initial_scale = 1.0;
  double initial_k = 1.0;
  /// Runs one untimed fixed-source solve before timing starts.
  bool warmup = false;
};

/// Power iteration with a fixed-source solver per outer iteration. Converged
/// when the L2 norm of the change in normalized cell scalar fluxes (all
/// groups concatenated) is below the configured tolerance.
EigenResult power_iteration(const Problem& problem, const PowerIterationOptions& options = {});

}  // namespace slabsn
