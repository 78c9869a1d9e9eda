#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "slabsn/material.hpp"

namespace slabsn {

struct BoundaryCondition {
  enum class Kind { vacuum, incoming, reflective };
  Kind kind = Kind::vacuum;
  /// Incoming angular flux for kind == incoming, length NG/2, ordered like
  /// the selected rows: group-major, ascending mu within the inward half.
  std::vector<double> incoming;

  static BoundaryCondition vacuum() { return {}; }
  static BoundaryCondition reflective() { return {Kind::reflective, {}}; }
  static BoundaryCondition inflow(std::vector<double> psi) {
    return {Kind::incoming, std::move(psi)};
  }
  bool operator==(const BoundaryCondition&) const = default;
};

struct SlabGeometry {
  std::vector<double> edges;               // x_0 < ... < x_R (cm)
  std::vector<std::size_t> region_material;  // index into the materials table
  BoundaryCondition left;
  BoundaryCondition right;

  std::size_t regions() const { return region_material.size(); }
  double width() const { return edges.back() - edges.front(); }
  bool operator==(const SlabGeometry&) const = default;
};

enum class SolverKind { analytic, sweep };
enum class Normalization { total_scalar_flux_one, none };
enum class InitialSource { abs_x, flat };
enum class SweepScheme { step, diamond };

struct SolverConfig {
  int sn_order = 16;
  std::size_t mesh_cells = 700;
  double tolerance = 1e-6;
  int max_outer = 200;
  int max_inner = 5000;
  std::optional<double> ke;
  SolverKind solver = SolverKind::analytic;
  Normalization normalization = Normalization::total_scalar_flux_one;
  InitialSource initial_source = InitialSource::abs_x;
  SweepScheme sweep_scheme = SweepScheme::step;

  bool operator==(const SolverConfig&) const = default;
};

struct Problem {
  SlabGeometry geometry;
  std::vector<MaterialXS> materials;
  SolverConfig config;

  std::size_t groups() const { return materials.front().groups(); }
  const MaterialXS& material_of_region(std::size_t r) const {
    return materials[geometry.region_material[r]];
  }

  /// Checks every invariant of geometry, materials and configuration.
  /// Throws Validation naming the violated constraint.
  void validate() const;

  bool operator==(const Problem&) const = default;
};

/// Fine mesh whose edges include every region interface.
struct FineMesh {
  std::vector<double> edges;
  std::vector<std::size_t> region_of_cell;

  std::size_t cells() const { return region_of_cell.size(); }
  double width(std::size_t m) const { return edges[m + 1] - edges[m]; }
  double center(std::size_t m) const { return 0.5 * (edges[m] + edges[m + 1]); }
  std::vector<double> centers() const;
};

/// Splits the slab into `cells` cells, distributing them over regions in
/// proportion to region width (at least one per region), uniform within each.
FineMesh build_fine_mesh(const SlabGeometry& geometry, std::size_t cells);

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& s);

}  // namespace slabsn
