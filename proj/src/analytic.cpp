#include "slabsn/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "slabsn/error.hpp"

namespace slabsn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

MatrixXd select_rows(const MatrixXd& matrix, const QuadratureSet& quad, Hemisphere hemisphere) {
  const Index N = static_cast<Index>(quad.size());
  if (N == 0 || matrix.rows() % N != 0) {
    throw Error(ErrorKind::InvalidArgument, "select_rows: row count is not a multiple of N");
  }
  const Index G = matrix.rows() / N;
  MatrixXd out(G * N / 2, matrix.cols());
  Index k = 0;
  for (Index g = 0; g < G; ++g) {
    for (Index n = 0; n < N; ++n) {
      const bool positive = quad.mu[static_cast<std::size_t>(n)] > 0.0;
      if (positive == (hemisphere == Hemisphere::positive)) out.row(k++) = matrix.row(g * N + n);
    }
  }
  return out;
}

std::vector<SpectrumPtr> region_spectra(const Problem& problem, const QuadratureSet& quad,
                                        double fission_scale) {
  std::map<std::size_t, SpectrumPtr> by_material;
  std::vector<SpectrumPtr> out;
  for (std::size_t id : problem.geometry.region_material) {
    auto it = by_material.find(id);
    if (it == by_material.end()) {
      const auto t = assemble_transport_matrix(problem.materials[id], quad, fission_scale);
      auto spectrum = std::make_shared<const BlockSpectrum>(block_diagonalize(t));
      it = by_material.emplace(id, std::move(spectrum)).first;
    }
    out.push_back(it->second);
  }
  return out;
}

namespace {

// A real pair (p, q) acted on by [[Re w, Im w], [-Im w, Re w]] maps to
// multiplication of p - i q by w.
inline cplx load(const VectorXd& v, const SpectralBlock& b) {
  return b.kind == SpectralBlock::Kind::real ? cplx{v(b.column), 0.0}
                                             : cplx{v(b.column), -v(b.column + 1)};
}

template <typename Row>
inline cplx load_row(const Row& v, const SpectralBlock& b) {
  return b.kind == SpectralBlock::Kind::real ? cplx{v(b.column), 0.0}
                                             : cplx{v(b.column), -v(b.column + 1)};
}

template <typename Row>
inline void store_row(Row&& v, const SpectralBlock& b, cplx z) {
  v(b.column) = z.real();
  if (b.kind == SpectralBlock::Kind::complex_pair) v(b.column + 1) = -z.imag();
}

bool on_edge(double x, double edge) { return std::abs(x - edge) <= 1e-12 * (1.0 + std::abs(edge)); }

}  // namespace

AnalyticSolver::AnalyticSolver(const SlabGeometry& geometry, std::vector<SpectrumPtr> spectra,
                               const QuadratureSet& quad, const FineMesh& mesh)
    : geometry_(geometry), quad_(quad), mesh_(mesh) {
  const std::size_t R = geometry.regions();
  if (spectra.size() != R) {
    throw Error(ErrorKind::InvalidArgument, "need one spectrum per region");
  }
  const Index N = static_cast<Index>(quad.size());
  dim_ = static_cast<std::size_t>(spectra.front()->dimension());
  const Index NG = static_cast<Index>(dim_);
  if (NG % N != 0) throw Error(ErrorKind::InvalidArgument, "spectrum size is not a multiple of N");
  for (const auto& s : spectra) {
    if (s->dimension() != NG) throw Error(ErrorKind::InvalidArgument, "spectra differ in size");
  }
  if (mesh.edges.size() != mesh.cells() + 1 || mesh.cells() == 0) {
    throw Error(ErrorKind::InvalidArgument, "fine mesh is empty or inconsistent");
  }

  inv_mu_.resize(NG);
  for (Index r = 0; r < NG; ++r) inv_mu_(r) = 1.0 / quad.mu[static_cast<std::size_t>(r % N)];

  // Align regions with fine cells.
  std::size_t cell = 0;
  if (!on_edge(mesh.edges.front(), geometry.edges.front()) ||
      !on_edge(mesh.edges.back(), geometry.edges.back())) {
    throw Error(ErrorKind::MeshMisaligned, "fine mesh does not cover the slab exactly");
  }
  for (std::size_t r = 0; r < R; ++r) {
    Region reg;
    reg.spectrum = spectra[r];
    reg.x_left = geometry.edges[r];
    reg.x_right = geometry.edges[r + 1];
    reg.first_cell = cell;
    while (cell < mesh.cells() && !on_edge(mesh.edges[cell + 1], reg.x_right) &&
           mesh.edges[cell + 1] < reg.x_right) {
      ++cell;
    }
    if (cell >= mesh.cells() || !on_edge(mesh.edges[cell + 1], reg.x_right)) {
      throw Error(ErrorKind::MeshMisaligned, "region interface x = " + std::to_string(reg.x_right) +
                                                 " is not a fine-mesh edge");
    }
    ++cell;
    reg.cell_count = cell - reg.first_cell;

    const auto& blocks = reg.spectrum->blocks;
    const std::size_t nb = blocks.size();
    reg.right_anchored.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) reg.right_anchored[k] = blocks[k].re > 0.0;
    const std::size_t total = reg.cell_count * nb;
    reg.step.resize(total);
    reg.step_src.resize(total);
    reg.half.resize(total);
    reg.half_src.resize(total);
    reg.center_gamma.resize(total);
    for (std::size_t j = 0; j < reg.cell_count; ++j) {
      const std::size_t m = reg.first_cell + j;
      const double d = mesh.width(m);
      const double c = mesh.center(m);
      for (std::size_t k = 0; k < nb; ++k) {
        const auto& b = blocks[k];
        const std::size_t idx = j * nb + k;
        if (reg.right_anchored[k]) {
          reg.step[idx] = block_exp(b, -d);
          reg.step_src[idx] = -block_exp_integral(b, -d, 0.0);
          reg.half[idx] = block_exp(b, -0.5 * d);
          reg.half_src[idx] = -block_exp_integral(b, -0.5 * d, 0.0);
          reg.center_gamma[idx] = block_exp(b, c - reg.x_right);
        } else {
          reg.step[idx] = block_exp(b, d);
          reg.step_src[idx] = block_exp_integral(b, 0.0, d);
          reg.half[idx] = block_exp(b, 0.5 * d);
          reg.half_src[idx] = block_exp_integral(b, 0.0, 0.5 * d);
          reg.center_gamma[idx] = block_exp(b, c - reg.x_left);
        }
      }
    }
    regions_.push_back(std::move(reg));
  }
  if (cell != mesh.cells()) {
    throw Error(ErrorKind::MeshMisaligned, "fine mesh extends beyond the last region");
  }

  // Boundary and continuity rows.
  const Index half = NG / 2;
  system_.regions = R;
  system_.dimension = dim_;
  system_.matrix = MatrixXd::Zero(NG * static_cast<Index>(R), NG * static_cast<Index>(R));
  system_.rhs = VectorXd::Zero(NG * static_cast<Index>(R));

  auto boundary_rows = [&](const MatrixXd& basis, const BoundaryCondition& bc, Hemisphere inward) {
    if (bc.kind != BoundaryCondition::Kind::reflective) return select_rows(basis, quad_, inward);
    // psi(mu) - psi(-mu) for every inward mu, paired by index mirror.
    MatrixXd rows(half, basis.cols());
    Index k = 0;
    for (Index g = 0; g < NG / N; ++g) {
      for (Index n = 0; n < N; ++n) {
        const bool positive = quad_.mu[static_cast<std::size_t>(n)] > 0.0;
        if (positive != (inward == Hemisphere::positive)) continue;
        const Index mirror = static_cast<Index>(quad_.mirror(static_cast<std::size_t>(n)));
        rows.row(k++) = basis.row(g * N + n) - basis.row(g * N + mirror);
      }
    }
    return rows;
  };

  const MatrixXd left_basis = basis_at(regions_.front(), geometry.edges.front());
  const MatrixXd right_basis = basis_at(regions_.back(), geometry.edges.back());
  system_.matrix.block(0, 0, half, NG) = boundary_rows(left_basis, geometry.left, Hemisphere::positive);
  system_.matrix.block(half, NG * static_cast<Index>(R - 1), half, NG) =
      boundary_rows(right_basis, geometry.right, Hemisphere::negative);
  for (std::size_t i = 0; i + 1 < R; ++i) {
    const double x = geometry.edges[i + 1];
    const Index row = NG * static_cast<Index>(i + 1);
    system_.matrix.block(row, NG * static_cast<Index>(i), NG, NG) = basis_at(regions_[i], x);
    system_.matrix.block(row, NG * static_cast<Index>(i + 1), NG, NG) = -basis_at(regions_[i + 1], x);
  }

  lu_.compute(system_.matrix);
  const double rcond = lu_.rcond();
  if (!(rcond >= 1e-14)) {
    throw Error(ErrorKind::SingularSystem,
                "boundary/continuity system is singular (rcond = " + std::to_string(rcond) + ")");
  }
}

AnalyticSolver AnalyticSolver::from_problem(const Problem& problem, const QuadratureSet& quad,
                                            const FineMesh& mesh, double fission_scale) {
  return AnalyticSolver(problem.geometry, region_spectra(problem, quad, fission_scale), quad, mesh);
}

std::vector<cplx> AnalyticSolver::anchored_gamma(const Region& region, double x) const {
  const auto& blocks = region.spectrum->blocks;
  std::vector<cplx> coeff(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    coeff[k] = block_exp(blocks[k], x - (region.right_anchored[k] ? region.x_right : region.x_left));
  }
  return coeff;
}

MatrixXd AnalyticSolver::basis_at(const Region& region, double x) const {
  const auto coeff = anchored_gamma(region, x);
  return region.spectrum->P *
         dense_block_diagonal(region.spectrum->blocks, coeff, static_cast<Index>(dim_));
}

MatrixXd AnalyticSolver::modal_source(const SourceField& source) const {
  source.validate(dim_);
  if (source.cells() != mesh_.cells()) {
    throw Error(ErrorKind::MeshMisaligned, "source mesh differs from the solver mesh");
  }
  for (std::size_t i = 0; i < mesh_.edges.size(); ++i) {
    if (!on_edge(source.mesh.edges[i], mesh_.edges[i])) {
      throw Error(ErrorKind::MeshMisaligned, "source mesh differs from the solver mesh");
    }
  }
  MatrixXd theta(source.values.rows(), source.values.cols());
  for (const auto& reg : regions_) {
    const auto first = static_cast<Index>(reg.first_cell);
    const auto n = static_cast<Index>(reg.cell_count);
    theta.middleRows(first, n).noalias() =
        (source.values.middleRows(first, n) * inv_mu_.asDiagonal()) * reg.spectrum->P_inv.transpose();
  }
  return theta;
}

std::vector<MatrixXd> AnalyticSolver::march(const MatrixXd& theta) const {
  std::vector<MatrixXd> particular;
  particular.reserve(regions_.size());
  for (const auto& reg : regions_) {
    const auto& blocks = reg.spectrum->blocks;
    const std::size_t nb = blocks.size();
    const std::size_t n = reg.cell_count;
    MatrixXd pi = MatrixXd::Zero(static_cast<Index>(n + 1), static_cast<Index>(dim_));
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& b = blocks[k];
      cplx z = 0.0;
      if (reg.right_anchored[k]) {
        for (std::size_t j = n; j-- > 0;) {
          const std::size_t idx = j * nb + k;
          z = reg.step[idx] * z +
              reg.step_src[idx] * load_row(theta.row(static_cast<Index>(reg.first_cell + j)), b);
          store_row(pi.row(static_cast<Index>(j)), b, z);
        }
      } else {
        for (std::size_t j = 0; j < n; ++j) {
          const std::size_t idx = j * nb + k;
          z = reg.step[idx] * z +
              reg.step_src[idx] * load_row(theta.row(static_cast<Index>(reg.first_cell + j)), b);
          store_row(pi.row(static_cast<Index>(j + 1)), b, z);
        }
      }
    }
    particular.push_back(std::move(pi));
  }
  return particular;
}

VectorXd AnalyticSolver::rhs(const std::vector<MatrixXd>& particular) const {
  const Index NG = static_cast<Index>(dim_);
  const Index N = static_cast<Index>(quad_.size());
  const Index half = NG / 2;
  const std::size_t R = regions_.size();
  VectorXd b = VectorXd::Zero(NG * static_cast<Index>(R));

  auto boundary = [&](const VectorXd& psi_particular, const BoundaryCondition& bc, Hemisphere inward) {
    VectorXd out(half);
    Index k = 0;
    for (Index g = 0; g < NG / N; ++g) {
      for (Index n = 0; n < N; ++n) {
        const bool positive = quad_.mu[static_cast<std::size_t>(n)] > 0.0;
        if (positive != (inward == Hemisphere::positive)) continue;
        const Index mirror = static_cast<Index>(quad_.mirror(static_cast<std::size_t>(n)));
        double v = 0.0;
        switch (bc.kind) {
          case BoundaryCondition::Kind::vacuum: v = -psi_particular(g * N + n); break;
          case BoundaryCondition::Kind::incoming:
            v = bc.incoming[static_cast<std::size_t>(k)] - psi_particular(g * N + n);
            break;
          case BoundaryCondition::Kind::reflective:
            v = -(psi_particular(g * N + n) - psi_particular(g * N + mirror));
            break;
        }
        out(k++) = v;
      }
    }
    return out;
  };

  const auto& first = regions_.front();
  const auto& last = regions_.back();
  const VectorXd left_part = first.spectrum->P * particular.front().row(0).transpose();
  const VectorXd right_part =
      last.spectrum->P * particular.back().row(static_cast<Index>(last.cell_count)).transpose();
  b.segment(0, half) = boundary(left_part, geometry_.left, Hemisphere::positive);
  b.segment(half, half) = boundary(right_part, geometry_.right, Hemisphere::negative);
  for (std::size_t i = 0; i + 1 < R; ++i) {
    const auto& a = regions_[i];
    const auto& c = regions_[i + 1];
    const VectorXd left_side = a.spectrum->P * particular[i].row(static_cast<Index>(a.cell_count)).transpose();
    const VectorXd right_side = c.spectrum->P * particular[i + 1].row(0).transpose();
    b.segment(NG * static_cast<Index>(i + 1), NG) = right_side - left_side;
  }
  return b;
}

GlobalSystem AnalyticSolver::assemble(const SourceField& source) const {
  GlobalSystem s = system_;
  s.rhs = rhs(march(modal_source(source)));
  return s;
}

namespace {

void check_residual(const MatrixXd& m, const VectorXd& x, const VectorXd& b) {
  const double residual = (m * x - b).norm();
  const double scale = m.norm() * x.norm() + b.norm();
  if (!x.allFinite() || residual > 1e-9 * scale) {
    throw Error(ErrorKind::SingularSystem,
                "coefficient solve residual " + std::to_string(residual) + " is too large");
  }
}

std::vector<VectorXd> split(const VectorXd& x, std::size_t regions, Index dim) {
  std::vector<VectorXd> out;
  for (std::size_t r = 0; r < regions; ++r) out.push_back(x.segment(static_cast<Index>(r) * dim, dim));
  return out;
}

}  // namespace

FixedSourceSolution AnalyticSolver::solve(const SourceField& source) const {
  FixedSourceSolution sol;
  sol.modal_source = modal_source(source);
  sol.particular_at_edges = march(sol.modal_source);
  const VectorXd b = rhs(sol.particular_at_edges);
  const VectorXd x = lu_.solve(b);
  check_residual(system_.matrix, x, b);
  const auto alphas = split(x, regions_.size(), static_cast<Index>(dim_));
  for (std::size_t r = 0; r < regions_.size(); ++r) {
    sol.regions.push_back(
        {r, regions_[r].x_left, regions_[r].x_right, alphas[r], regions_[r].spectrum});
  }
  return sol;
}

std::size_t AnalyticSolver::locate_region(double x) const {
  const double lo = geometry_.edges.front();
  const double hi = geometry_.edges.back();
  if (!(x >= lo - 1e-12 * (1.0 + std::abs(lo)) && x <= hi + 1e-12 * (1.0 + std::abs(hi)))) {
    throw Error(ErrorKind::PointOutOfDomain, "point x = " + std::to_string(x) + " is outside the slab");
  }
  for (std::size_t r = 0; r < regions_.size(); ++r) {
    if (x <= regions_[r].x_right) return r;
  }
  return regions_.size() - 1;
}

VectorXd AnalyticSolver::evaluate_in_region(const FixedSourceSolution& sol, std::size_t r,
                                            double x) const {
  const auto& reg = regions_.at(r);
  const double tol = 1e-12 * (1.0 + std::abs(x));
  if (x < reg.x_left - tol || x > reg.x_right + tol) {
    throw Error(ErrorKind::PointOutOfDomain, "point is outside the requested region");
  }
  x = std::clamp(x, reg.x_left, reg.x_right);
  // Local cell j with e_j <= x <= e_{j+1}.
  const auto begin = mesh_.edges.begin() + static_cast<std::ptrdiff_t>(reg.first_cell);
  const auto end = begin + static_cast<std::ptrdiff_t>(reg.cell_count + 1);
  std::size_t j = static_cast<std::size_t>(std::upper_bound(begin, end, x) - begin);
  j = std::clamp<std::size_t>(j, 1, reg.cell_count) - 1;
  const double e0 = mesh_.edges[reg.first_cell + j];
  const double e1 = mesh_.edges[reg.first_cell + j + 1];

  const auto& blocks = reg.spectrum->blocks;
  const auto& pi = sol.particular_at_edges[r];
  const auto theta = sol.modal_source.row(static_cast<Index>(reg.first_cell + j));
  const VectorXd& alpha = sol.regions[r].alpha;
  VectorXd X(static_cast<Index>(dim_));
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const auto& b = blocks[k];
    cplx particular;
    cplx homogeneous;
    if (reg.right_anchored[k]) {
      particular = block_exp(b, x - e1) * load_row(pi.row(static_cast<Index>(j + 1)), b) -
                   block_exp_integral(b, x - e1, 0.0) * load_row(theta, b);
      homogeneous = block_exp(b, x - reg.x_right) * load(alpha, b);
    } else {
      particular = block_exp(b, x - e0) * load_row(pi.row(static_cast<Index>(j)), b) +
                   block_exp_integral(b, 0.0, x - e0) * load_row(theta, b);
      homogeneous = block_exp(b, x - reg.x_left) * load(alpha, b);
    }
    store_row(X, b, homogeneous + particular);
  }
  return reg.spectrum->P * X;
}

FluxField AnalyticSolver::evaluate(const FixedSourceSolution& sol, std::span<const double> points) const {
  MatrixXd psi(static_cast<Index>(points.size()), static_cast<Index>(dim_));
  for (std::size_t p = 0; p < points.size(); ++p) {
    psi.row(static_cast<Index>(p)) = evaluate_in_region(sol, locate_region(points[p]), points[p]).transpose();
  }
  return make_flux_field({points.begin(), points.end()}, std::move(psi), quad_, groups());
}

FluxField AnalyticSolver::evaluate_centers(const FixedSourceSolution& sol) const {
  MatrixXd psi(static_cast<Index>(mesh_.cells()), static_cast<Index>(dim_));
  for (std::size_t r = 0; r < regions_.size(); ++r) {
    const auto& reg = regions_[r];
    const auto& blocks = reg.spectrum->blocks;
    const std::size_t nb = blocks.size();
    const auto& pi = sol.particular_at_edges[r];
    const VectorXd& alpha = sol.regions[r].alpha;
    MatrixXd X(static_cast<Index>(reg.cell_count), static_cast<Index>(dim_));
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& b = blocks[k];
      const cplx a = load(alpha, b);
      const bool right = reg.right_anchored[k];
      for (std::size_t j = 0; j < reg.cell_count; ++j) {
        const std::size_t idx = j * nb + k;
        const auto edge = static_cast<Index>(right ? j + 1 : j);
        const cplx z = reg.center_gamma[idx] * a + reg.half[idx] * load_row(pi.row(edge), b) +
                       reg.half_src[idx] *
                           load_row(sol.modal_source.row(static_cast<Index>(reg.first_cell + j)), b);
        store_row(X.row(static_cast<Index>(j)), b, z);
      }
    }
    psi.middleRows(static_cast<Index>(reg.first_cell), static_cast<Index>(reg.cell_count)).noalias() =
        X * reg.spectrum->P.transpose();
  }
  return make_flux_field(mesh_.centers(), std::move(psi), quad_, groups());
}

GlobalSystem assemble_global_system(const SlabGeometry& geometry, const std::vector<SpectrumPtr>& spectra,
                                    const SourceField& source, const QuadratureSet& quad) {
  return AnalyticSolver(geometry, spectra, quad, source.mesh).assemble(source);
}

std::vector<VectorXd> solve_alpha(const GlobalSystem& system) {
  if (!system.matrix.allFinite() || !system.rhs.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "global system has non-finite entries");
  }
  Eigen::PartialPivLU<MatrixXd> lu(system.matrix);
  const double rcond = lu.rcond();
  if (!(rcond >= 1e-14)) {
    throw Error(ErrorKind::SingularSystem,
                "boundary/continuity system is singular (rcond = " + std::to_string(rcond) + ")");
  }
  const VectorXd x = lu.solve(system.rhs);
  check_residual(system.matrix, x, system.rhs);
  return split(x, system.regions, static_cast<Index>(system.dimension));
}

FluxField fixed_source_solve(const Problem& problem, const SourceField& source) {
  const auto quad = gauss_legendre(problem.config.sn_order);
  const auto solver = AnalyticSolver::from_problem(problem, quad, source.mesh, 0.0);
  return solver.evaluate_centers(solver.solve(source));
}

}  // namespace slabsn
