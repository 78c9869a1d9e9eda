#include "slabsn/sweep.hpp"

#include <cmath>
#include <string>

#include "slabsn/error.hpp"

namespace slabsn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Sweeps every ordinate of one hemisphere, writing cell averages into
// out.psi and the exiting fluxes into out.exit_left / out.exit_right.
void sweep_hemisphere(const SweepMesh& mesh, const QuadratureSet& quad, const VectorXd& incoming,
                      bool positive, SweepScheme scheme, SweepResult& out) {
  const Index M = static_cast<Index>(mesh.cells());
  const Index N = static_cast<Index>(quad.size());
  const Index G = mesh.sigma_t.cols();
  const bool diamond = scheme == SweepScheme::diamond;
  const double factor = diamond ? 2.0 : 1.0;
  Index k = 0;
  for (Index g = 0; g < G; ++g) {
    for (Index n = 0; n < N; ++n) {
      const double mu = quad.mu[static_cast<std::size_t>(n)];
      if ((mu > 0.0) != positive) continue;
      const Index r = g * N + n;
      const double amu = std::abs(mu);
      const double* q = mesh.source.col(r).data();
      const double* st = mesh.sigma_t.col(g).data();
      const double* dx = mesh.width.data();
      double* psi = out.psi.col(r).data();
      double in = incoming(k);
      if (positive) {
        for (Index m = 0; m < M; ++m) {
          const double t = factor * amu / dx[m];
          const double c = (t * in + q[m]) / (t + st[m]);
          psi[m] = c;
          in = diamond ? 2.0 * c - in : c;
        }
        out.exit_right(k++) = in;
      } else {
        for (Index m = M; m-- > 0;) {
          const double t = factor * amu / dx[m];
          const double c = (t * in + q[m]) / (t + st[m]);
          psi[m] = c;
          in = diamond ? 2.0 * c - in : c;
        }
        out.exit_left(k++) = in;
      }
    }
  }
}

void check_shapes(const SweepMesh& mesh, const QuadratureSet& quad) {
  const Index M = static_cast<Index>(mesh.cells());
  const Index NG = mesh.sigma_t.cols() * static_cast<Index>(quad.size());
  if (mesh.source.rows() != M || mesh.source.cols() != NG || mesh.sigma_t.rows() != M) {
    throw Error(ErrorKind::InvalidArgument, "sweep mesh arrays have inconsistent shapes");
  }
}

SweepResult empty_result(const SweepMesh& mesh, const QuadratureSet& quad) {
  const Index NG = mesh.sigma_t.cols() * static_cast<Index>(quad.size());
  SweepResult out;
  out.psi.resize(static_cast<Index>(mesh.cells()), NG);
  out.exit_left.resize(NG / 2);
  out.exit_right.resize(NG / 2);
  return out;
}

}  // namespace

SweepResult sweep_once(const SweepMesh& mesh, const QuadratureSet& quad, const SweepBoundary& boundary,
                       SweepScheme scheme) {
  check_shapes(mesh, quad);
  const Index half = mesh.sigma_t.cols() * static_cast<Index>(quad.size()) / 2;
  if (boundary.left.size() != half || boundary.right.size() != half) {
    throw Error(ErrorKind::InvalidArgument, "sweep boundary vectors must have length NG/2");
  }
  SweepResult out = empty_result(mesh, quad);
  sweep_hemisphere(mesh, quad, boundary.left, true, scheme, out);
  sweep_hemisphere(mesh, quad, boundary.right, false, scheme, out);
  return out;
}

SweepSolver::SweepSolver(const Problem& problem, const QuadratureSet& quad, const FineMesh& mesh,
                         double fission_scale)
    : quad_(quad),
      mesh_(mesh),
      groups_(problem.groups()),
      materials_(problem.materials),
      left_(problem.geometry.left),
      right_(problem.geometry.right),
      fission_scale_(fission_scale),
      scheme_(problem.config.sweep_scheme),
      max_inner_(problem.config.max_inner) {
  const std::size_t M = mesh.cells();
  const auto G = static_cast<Index>(groups_);
  sweep_mesh_.width.resize(M);
  sweep_mesh_.sigma_t.resize(static_cast<Index>(M), G);
  cell_material_.resize(M);
  for (std::size_t m = 0; m < M; ++m) {
    const std::size_t r = mesh.region_of_cell.at(m);
    cell_material_[m] = problem.geometry.region_material.at(r);
    sweep_mesh_.width[m] = mesh.width(m);
    const auto& mat = materials_[cell_material_[m]];
    for (Index g = 0; g < G; ++g) {
      sweep_mesh_.sigma_t(static_cast<Index>(m), g) = mat.sigma_t[static_cast<std::size_t>(g)];
    }
  }
  bool scatters = false;
  for (const auto& mat : materials_) {
    for (const auto& row : mat.sigma_s) {
      for (double v : row) scatters = scatters || v > 0.0;
    }
    if (mat.scattering_kernel && (mat.scattering_kernel->array() > 0.0).any()) scatters = true;
    if (fission_scale > 0.0 && mat.fissile()) scatters = true;
  }
  const bool both_reflective = left_.kind == BoundaryCondition::Kind::reflective &&
                               right_.kind == BoundaryCondition::Kind::reflective;
  coupled_ = scatters || both_reflective;
}

void SweepSolver::emission(const MatrixXd& psi, const MatrixXd& phi, MatrixXd& q) const {
  const auto N = static_cast<Index>(quad_.size());
  const auto G = static_cast<Index>(groups_);
  for (Index m = 0; m < q.rows(); ++m) {
    const auto& mat = materials_[cell_material_[static_cast<std::size_t>(m)]];
    double fission = 0.0;
    if (fission_scale_ > 0.0) {
      for (Index gp = 0; gp < G; ++gp) fission += mat.nu_sigma_f[static_cast<std::size_t>(gp)] * phi(m, gp);
    }
    if (mat.scattering_kernel) {
      const auto& k = *mat.scattering_kernel;
      for (Index r = 0; r < G * N; ++r) {
        double s = 0.0;
        for (Index c = 0; c < G * N; ++c) s += quad_.weight[static_cast<std::size_t>(c % N)] * k(r, c) * psi(m, c);
        q(m, r) += s + 0.5 * fission_scale_ * mat.chi[static_cast<std::size_t>(r / N)] * fission;
      }
      continue;
    }
    for (Index g = 0; g < G; ++g) {
      double s = 0.0;
      for (Index gp = 0; gp < G; ++gp) {
        s += mat.sigma_s[static_cast<std::size_t>(gp)][static_cast<std::size_t>(g)] * phi(m, gp);
      }
      s = 0.5 * (s + fission_scale_ * mat.chi[static_cast<std::size_t>(g)] * fission);
      for (Index n = 0; n < N; ++n) q(m, g * N + n) += s;
    }
  }
}

namespace {

// Incoming vector for one end: given flux or mirror of the outgoing one.
VectorXd incoming(const BoundaryCondition& bc, const VectorXd& outgoing, std::size_t groups,
                  std::size_t ordinates) {
  const auto half = static_cast<Index>(groups * ordinates / 2);
  switch (bc.kind) {
    case BoundaryCondition::Kind::vacuum: return VectorXd::Zero(half);
    case BoundaryCondition::Kind::incoming:
      return Eigen::Map<const VectorXd>(bc.incoming.data(), half);
    case BoundaryCondition::Kind::reflective: {
      // Outgoing entries are ascending in mu within each group; the mirror of
      // the k-th inward ordinate is the (N/2 - 1 - k)-th outward one.
      const auto per_group = static_cast<Index>(ordinates / 2);
      VectorXd in(half);
      for (Index g = 0; g < static_cast<Index>(groups); ++g) {
        for (Index k = 0; k < per_group; ++k) {
          in(g * per_group + k) = outgoing(g * per_group + per_group - 1 - k);
        }
      }
      return in;
    }
  }
  return VectorXd::Zero(half);
}

}  // namespace

SweepSolution SweepSolver::solve(const SourceField& external, double tolerance, const MatrixXd* guess) const {
  const auto M = static_cast<Index>(mesh_.cells());
  const auto NG = static_cast<Index>(dimension());
  external.validate(dimension());
  if (external.values.rows() != M) {
    throw Error(ErrorKind::MeshMisaligned, "external source mesh differs from the sweep mesh");
  }
  SweepSolution sol;
  sol.psi = guess ? *guess : MatrixXd::Zero(M, NG);
  if (sol.psi.rows() != M || sol.psi.cols() != NG) {
    throw Error(ErrorKind::InvalidArgument, "initial guess has the wrong shape");
  }
  MatrixXd phi = scalar_flux(sol.psi, quad_, groups_);

  SweepMesh mesh = sweep_mesh_;
  const auto half = NG / 2;
  VectorXd exit_left = VectorXd::Zero(half);
  VectorXd exit_right = VectorXd::Zero(half);
  const bool left_reflective = left_.kind == BoundaryCondition::Kind::reflective;
  const bool right_reflective = right_.kind == BoundaryCondition::Kind::reflective;

  for (int it = 1; it <= max_inner_; ++it) {
    mesh.source = external.values;
    emission(sol.psi, phi, mesh.source);

    // Sweep towards a reflective end first so its incoming flux is current.
    SweepResult res = empty_result(mesh, quad_);
    if (left_reflective && !right_reflective) {
      sweep_hemisphere(mesh, quad_, incoming(right_, exit_right, groups_, quad_.size()), false, scheme_, res);
      sweep_hemisphere(mesh, quad_, incoming(left_, res.exit_left, groups_, quad_.size()), true, scheme_, res);
    } else {
      sweep_hemisphere(mesh, quad_, incoming(left_, exit_left, groups_, quad_.size()), true, scheme_, res);
      sweep_hemisphere(mesh, quad_, incoming(right_, res.exit_right, groups_, quad_.size()), false, scheme_, res);
    }
    exit_left = res.exit_left;
    exit_right = res.exit_right;

    MatrixXd phi_new = scalar_flux(res.psi, quad_, groups_);
    const double change = (phi_new - phi).norm();
    sol.psi = std::move(res.psi);
    phi = std::move(phi_new);
    sol.iterations = it;
    sol.change_history.push_back(change);
    if (!coupled_ || change < tolerance) return sol;
    if (!std::isfinite(change)) break;
  }
  throw Error(ErrorKind::MaxInnerIterations,
              "source iteration did not converge in " + std::to_string(max_inner_) +
                  (fission_scale_ > 0.0 ? " sweeps (a Wielandt shift makes the inner problem nearly critical)"
                                        : " sweeps (scattering ratio near one?)"));
}

SweepSolution source_iteration(const Problem& problem, const QuadratureSet& quad,
                               const SourceField& external, double tolerance) {
  return SweepSolver(problem, quad, external.mesh).solve(external, tolerance);
}

}  // namespace slabsn
