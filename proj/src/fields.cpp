#include "slabsn/fields.hpp"

#include <cmath>

#include "slabsn/error.hpp"

namespace slabsn {

void SourceField::validate(std::size_t dimension) const {
  if (mesh.edges.size() != mesh.cells() + 1 || mesh.cells() == 0) {
    throw Error(ErrorKind::InvalidArgument, "source mesh is empty or inconsistent");
  }
  for (std::size_t m = 0; m < mesh.cells(); ++m) {
    if (!(mesh.edges[m + 1] > mesh.edges[m])) {
      throw Error(ErrorKind::InvalidArgument, "source mesh edges must be strictly increasing");
    }
  }
  if (values.rows() != static_cast<Eigen::Index>(mesh.cells()) ||
      values.cols() != static_cast<Eigen::Index>(dimension)) {
    throw Error(ErrorKind::InvalidArgument, "source values must be cells x NG");
  }
  if (!values.allFinite()) throw Error(ErrorKind::InvalidArgument, "source values must be finite");
}

Eigen::MatrixXd scalar_flux(const Eigen::MatrixXd& psi, const QuadratureSet& quad, std::size_t groups) {
  const auto N = static_cast<Eigen::Index>(quad.size());
  const auto G = static_cast<Eigen::Index>(groups);
  Eigen::Map<const Eigen::VectorXd> w(quad.weight.data(), N);
  Eigen::MatrixXd phi(psi.rows(), G);
  for (Eigen::Index g = 0; g < G; ++g) phi.col(g) = psi.middleCols(g * N, N) * w;
  return phi;
}

FluxField make_flux_field(std::vector<double> points, Eigen::MatrixXd psi, const QuadratureSet& quad,
                          std::size_t groups) {
  FluxField f;
  f.phi = scalar_flux(psi, quad, groups);
  f.points = std::move(points);
  f.psi = std::move(psi);
  f.groups = groups;
  f.ordinates = quad.size();
  return f;
}

SourceField initial_source(const FineMesh& mesh, std::size_t dimension, InitialSource shape,
                           double scale) {
  SourceField s;
  s.mesh = mesh;
  s.values.resize(static_cast<Eigen::Index>(mesh.cells()), static_cast<Eigen::Index>(dimension));
  for (std::size_t m = 0; m < mesh.cells(); ++m) {
    const double v = shape == InitialSource::abs_x ? std::abs(mesh.center(m)) : 1.0;
    s.values.row(static_cast<Eigen::Index>(m)).setConstant(scale * v);
  }
  return s;
}

}  // namespace slabsn
