#include "slabsn/problem.hpp"

#include <algorithm>
#include <cmath>

#include "slabsn/error.hpp"

namespace slabsn {

namespace {

void validate_boundary(const BoundaryCondition& bc, std::size_t half, const char* side) {
  if (bc.kind != BoundaryCondition::Kind::incoming) {
    if (!bc.incoming.empty()) {
      throw Error(ErrorKind::Validation,
                  std::string("geometry.") + side + ": only incoming boundaries carry a flux vector");
    }
    return;
  }
  if (bc.incoming.size() != half) {
    throw Error(ErrorKind::Validation, std::string("geometry.") + side +
                                           ": incoming flux must have length NG/2 = " +
                                           std::to_string(half));
  }
  for (double v : bc.incoming) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::Validation,
                  std::string("geometry.") + side + ": incoming flux must be finite and >= 0");
    }
  }
}

}  // namespace

void Problem::validate() const {
  const auto& g = geometry;
  if (g.edges.size() < 2) {
    throw Error(ErrorKind::Validation, "geometry.edges: need at least two edges (R >= 1)");
  }
  if (g.region_material.size() + 1 != g.edges.size()) {
    throw Error(ErrorKind::Validation, "geometry.regions: need exactly one material per region");
  }
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (!std::isfinite(g.edges[i])) {
      throw Error(ErrorKind::Validation, "geometry.edges: non-finite edge");
    }
    if (i > 0 && !(g.edges[i] > g.edges[i - 1])) {
      throw Error(ErrorKind::Validation, "geometry.edges: edges must be strictly increasing");
    }
  }
  if (materials.empty()) throw Error(ErrorKind::Validation, "materials: table is empty");
  for (const auto& m : materials) m.validate();
  const std::size_t groups = materials.front().groups();
  for (const auto& m : materials) {
    if (m.groups() != groups) {
      throw Error(ErrorKind::Validation, "materials: all materials must share the group count");
    }
  }
  for (std::size_t id : g.region_material) {
    if (id >= materials.size()) {
      throw Error(ErrorKind::Validation, "geometry.regions: unknown material");
    }
  }

  const auto& c = config;
  if (c.sn_order < 2 || c.sn_order > 64 || c.sn_order % 2 != 0) {
    throw Error(ErrorKind::Validation, "solver.sn_order: must be even in [2, 64]");
  }
  if (c.mesh_cells < g.regions()) {
    throw Error(ErrorKind::Validation, "solver.mesh_cells: must be >= number of regions");
  }
  if (!(c.tolerance > 0.0)) throw Error(ErrorKind::Validation, "solver.tolerance: must be > 0");
  if (c.max_outer < 1) throw Error(ErrorKind::Validation, "solver.max_outer: must be >= 1");
  if (c.max_inner < 1) throw Error(ErrorKind::Validation, "solver.max_inner: must be >= 1");
  if (c.ke && !(*c.ke > 0.0 && std::isfinite(*c.ke))) {
    throw Error(ErrorKind::Validation, "solver.ke: must be a positive number");
  }
  for (const auto& m : materials) {
    if (m.scattering_kernel &&
        m.scattering_kernel->rows() != static_cast<Eigen::Index>(groups * c.sn_order)) {
      throw Error(ErrorKind::Validation,
                  "material '" + m.name + "': scattering_kernel size must equal G*sn_order");
    }
  }

  const std::size_t half = groups * static_cast<std::size_t>(c.sn_order) / 2;
  validate_boundary(g.left, half, "bc_left");
  validate_boundary(g.right, half, "bc_right");
}

std::vector<double> FineMesh::centers() const {
  std::vector<double> c(cells());
  for (std::size_t m = 0; m < c.size(); ++m) c[m] = center(m);
  return c;
}

FineMesh build_fine_mesh(const SlabGeometry& geometry, std::size_t cells) {
  const std::size_t regions = geometry.regions();
  if (cells < regions) {
    throw Error(ErrorKind::InvalidArgument, "fine mesh needs at least one cell per region");
  }
  const double total = geometry.width();

  // Largest-remainder apportionment with a floor of one cell per region.
  std::vector<std::size_t> count(regions, 1);
  std::vector<double> remainder(regions, 0.0);
  std::size_t assigned = 0;
  for (std::size_t r = 0; r < regions; ++r) {
    const double share = static_cast<double>(cells) *
                         (geometry.edges[r + 1] - geometry.edges[r]) / total;
    const double rounded = std::floor(share + 1e-9);
    count[r] = std::max<std::size_t>(1, static_cast<std::size_t>(rounded));
    remainder[r] = share - rounded;
    assigned += count[r];
  }
  while (assigned < cells) {
    const auto r = static_cast<std::size_t>(
        std::max_element(remainder.begin(), remainder.end()) - remainder.begin());
    ++count[r];
    remainder[r] -= 1.0;
    ++assigned;
  }
  while (assigned > cells) {
    std::size_t best = regions;
    for (std::size_t r = 0; r < regions; ++r) {
      if (count[r] > 1 && (best == regions || remainder[r] < remainder[best])) best = r;
    }
    --count[best];
    remainder[best] += 1.0;
    --assigned;
  }

  FineMesh mesh;
  mesh.edges.reserve(cells + 1);
  mesh.edges.push_back(geometry.edges.front());
  for (std::size_t r = 0; r < regions; ++r) {
    const double a = geometry.edges[r];
    const double b = geometry.edges[r + 1];
    for (std::size_t k = 1; k <= count[r]; ++k) {
      mesh.edges.push_back(k == count[r] ? b : a + (b - a) * static_cast<double>(k) /
                                                       static_cast<double>(count[r]));
      mesh.region_of_cell.push_back(r);
    }
  }
  return mesh;
}

std::string to_string(SolverKind kind) {
  return kind == SolverKind::analytic ? "analytic" : "sweep";
}

SolverKind solver_kind_from_string(const std::string& s) {
  if (s == "analytic") return SolverKind::analytic;
  if (s == "sweep") return SolverKind::sweep;
  throw Error(ErrorKind::InvalidArgument, "unknown solver kind '" + s + "'");
}

}  // namespace slabsn
