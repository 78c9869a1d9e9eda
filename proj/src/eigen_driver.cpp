#include "slabsn/eigen_driver.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "slabsn/analytic.hpp"
#include "slabsn/error.hpp"
#include "slabsn/sweep.hpp"

namespace slabsn {

using Eigen::Index;
using Eigen::MatrixXd;

SourceField fission_source(const FluxField& flux, const FineMesh& mesh, const Problem& problem, double k,
                           std::optional<double> ke) {
  if (!(k > 0.0)) throw Error(ErrorKind::InvalidArgument, "fission_source: k must be positive");
  if (flux.points.size() != mesh.cells()) {
    throw Error(ErrorKind::InvalidArgument, "fission_source: flux must be sampled once per cell");
  }
  const double factor = 1.0 / k - (ke ? 1.0 / *ke : 0.0);
  if (std::abs(factor) < 1e-12) {
    throw Error(ErrorKind::ShiftAtEigenvalue,
                "1/k - 1/k_e vanishes (k = " + std::to_string(k) +
                    "); move the Wielandt shift away from the eigenvalue");
  }
  const auto G = static_cast<Index>(flux.groups);
  const auto N = static_cast<Index>(flux.ordinates);
  SourceField q;
  q.mesh = mesh;
  q.values = MatrixXd::Zero(static_cast<Index>(mesh.cells()), G * N);
  for (std::size_t m = 0; m < mesh.cells(); ++m) {
    const auto& mat = problem.material_of_region(mesh.region_of_cell[m]);
    double production = 0.0;
    for (Index g = 0; g < G; ++g) {
      production += mat.nu_sigma_f[static_cast<std::size_t>(g)] * flux.phi(static_cast<Index>(m), g);
    }
    for (Index g = 0; g < G; ++g) {
      const double v = 0.5 * factor * mat.chi[static_cast<std::size_t>(g)] * production;
      q.values.row(static_cast<Index>(m)).segment(g * N, N).setConstant(v);
    }
  }
  return q;
}

double fission_integral(const FluxField& flux, const FineMesh& mesh, const Problem& problem) {
  double total = 0.0;
  for (std::size_t m = 0; m < mesh.cells(); ++m) {
    const auto& mat = problem.material_of_region(mesh.region_of_cell[m]);
    double production = 0.0;
    for (std::size_t g = 0; g < flux.groups; ++g) {
      production += mat.nu_sigma_f[g] * flux.phi(static_cast<Index>(m), static_cast<Index>(g));
    }
    total += mesh.width(m) * production;
  }
  return total;
}

double update_keff(double k, std::optional<double> ke, double prev_integral, double new_integral) {
  if (!(prev_integral > 0.0) || !(new_integral > 0.0)) {
    throw Error(ErrorKind::NonpositiveIntegral, "fission integral must be positive to update k");
  }
  if (!ke) return k * new_integral / prev_integral;
  const double inv = 1.0 / *ke + (1.0 / k - 1.0 / *ke) * prev_integral / new_integral;
  return 1.0 / inv;
}

FluxField normalize(const FluxField& flux, const FineMesh& mesh) {
  if (flux.points.size() != mesh.cells()) {
    throw Error(ErrorKind::InvalidArgument, "normalize: flux must be sampled once per cell");
  }
  double total = 0.0;
  for (std::size_t m = 0; m < mesh.cells(); ++m) {
    total += mesh.width(m) * flux.phi.row(static_cast<Index>(m)).sum();
  }
  if (!(std::abs(total) > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorKind::ZeroFlux, "cannot normalize a zero or non-finite flux");
  }
  FluxField out = flux;
  out.psi /= total;
  out.phi /= total;
  return out;
}

namespace {

class FixedSourceOperator {
 public:
  virtual ~FixedSourceOperator() = default;
  virtual FluxField solve(const SourceField& source) = 0;
  virtual long inner_sweeps() const { return 0; }
};

class AnalyticOperator final : public FixedSourceOperator {
 public:
  AnalyticOperator(const Problem& problem, const QuadratureSet& quad, const FineMesh& mesh, double scale)
      : solver_(AnalyticSolver::from_problem(problem, quad, mesh, scale)) {}
  FluxField solve(const SourceField& source) override {
    return solver_.evaluate_centers(solver_.solve(source));
  }

 private:
  AnalyticSolver solver_;
};

class SweepOperator final : public FixedSourceOperator {
 public:
  SweepOperator(const Problem& problem, const QuadratureSet& quad, const FineMesh& mesh, double scale,
                double tolerance)
      : solver_(problem, quad, mesh, scale), quad_(quad), groups_(problem.groups()), tolerance_(tolerance) {}

  FluxField solve(const SourceField& source) override {
    auto sol = solver_.solve(source, tolerance_, last_ ? &*last_ : nullptr);
    sweeps_ += sol.iterations;
    last_ = sol.psi;
    return make_flux_field(solver_.mesh().centers(), std::move(sol.psi), quad_, groups_);
  }
  long inner_sweeps() const override { return sweeps_; }

 private:
  SweepSolver solver_;
  QuadratureSet quad_;
  std::size_t groups_;
  double tolerance_;
  std::optional<MatrixXd> last_;
  long sweeps_ = 0;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

EigenResult power_iteration(const Problem& problem, const PowerIterationOptions& options) {
  problem.validate();
  bool fissile = false;
  for (std::size_t id : problem.geometry.region_material) fissile = fissile || problem.materials[id].fissile();
  if (!fissile) throw Error(ErrorKind::InvalidArgument, "power iteration needs a fissile region");

  const auto& cfg = problem.config;
  EigenResult result;
  result.solver = cfg.solver;
  result.ke = cfg.ke;
  result.tolerance = cfg.tolerance;
  result.sn_order = cfg.sn_order;
  result.mesh_cells = cfg.mesh_cells;

  const auto setup_start = std::chrono::steady_clock::now();
  const auto quad = gauss_legendre(cfg.sn_order);
  const auto mesh = build_fine_mesh(problem.geometry, cfg.mesh_cells);
  const double scale = cfg.ke ? 1.0 / *cfg.ke : 0.0;
  std::unique_ptr<FixedSourceOperator> op;
  if (cfg.solver == SolverKind::analytic) {
    op = std::make_unique<AnalyticOperator>(problem, quad, mesh, scale);
  } else {
    op = std::make_unique<SweepOperator>(problem, quad, mesh, scale, 0.5 * cfg.tolerance);
  }
  const std::size_t dim = problem.groups() * quad.size();
  const SourceField initial = initial_source(mesh, dim, cfg.initial_source, options.initial_scale);
  result.setup_seconds = seconds_since(setup_start);

  if (options.warmup) {
    if (cfg.solver == SolverKind::analytic) {
      (void)op->solve(initial);
    } else {
      // The sweep operator carries its last iterate; warm up a throwaway copy.
      SweepOperator(problem, quad, mesh, scale, 0.5 * cfg.tolerance).solve(initial);
    }
  }

  const auto t0 = std::chrono::steady_clock::now();
  double k = options.initial_k;
  // With normalization off the fission source is built from the raw flux;
  // the convergence test always compares normalized shapes.
  const bool renormalize = cfg.normalization == Normalization::total_scalar_flux_one;
  FluxField raw = op->solve(initial);
  FluxField shape = normalize(raw, mesh);
  FluxField driving = renormalize ? shape : raw;
  int iteration = 1;
  result.history.push_back({iteration, k, std::numeric_limits<double>::quiet_NaN(), seconds_since(t0)});

  bool converged = false;
  while (iteration < cfg.max_outer) {
    const SourceField q = fission_source(driving, mesh, problem, k, cfg.ke);
    raw = op->solve(q);
    ++iteration;
    const double prev_integral = fission_integral(driving, mesh, problem);
    const double new_integral = fission_integral(raw, mesh, problem);
    k = update_keff(k, cfg.ke, prev_integral, new_integral);
    FluxField next = normalize(raw, mesh);
    const double change = (next.phi - shape.phi).norm();
    shape = std::move(next);
    driving = renormalize ? shape : raw;
    result.history.push_back({iteration, k, change, seconds_since(t0)});
    if (!std::isfinite(k) || !std::isfinite(change)) break;
    if (change < cfg.tolerance) {
      converged = true;
      break;
    }
  }
  result.solve_seconds = seconds_since(t0);
  result.inner_sweeps = op->inner_sweeps();
  if (!converged) {
    throw Error(ErrorKind::MaxOuterIterations,
                "power iteration did not converge in " + std::to_string(iteration) +
                    " outer iterations (k = " + std::to_string(k) + ")");
  }
  result.k_eff = k;
  result.iterations = iteration;
  result.flux = renormalize ? std::move(shape) : std::move(raw);
  return result;
}

}  // namespace slabsn
