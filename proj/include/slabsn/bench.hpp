#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "slabsn/eigen_driver.hpp"
#include "slabsn/problem.hpp"

namespace slabsn {

struct BenchmarkMatrix {
  std::vector<SolverKind> solvers{SolverKind::analytic, SolverKind::sweep};
  std::vector<int> orders{2, 4, 8, 16};
  std::vector<std::optional<double>> shifts{std::nullopt};
  bool parallel = false;
};

struct BenchmarkCell {
  SolverKind solver = SolverKind::analytic;
  int sn_order = 0;
  std::optional<double> ke;
  bool converged = false;
  std::string error;
  EigenResult result;

  std::string label() const;
  double total_seconds() const { return result.setup_seconds + result.solve_seconds; }
};

struct Speedup {
  std::string baseline;
  std::string cell;
  double ratio = 0.0;  // baseline total time / cell total time
};

struct BenchmarkReport {
  std::vector<BenchmarkCell> cells;
  std::vector<Speedup> speedups;
  std::string time_unit_cell;          // cell whose mean iteration time is the plot unit
  double time_unit_seconds = 0.0;
  double tolerance = 0.0;
  std::size_t mesh_cells = 0;
  bool parallel = false;

  std::vector<std::string> failures() const;
};

/// Runs every (solver, order, shift) cell with the problem's tolerance and
/// mesh. Each cell gets an untimed warm-up solve. A failing cell is recorded
/// and the rest still run.
BenchmarkReport run_benchmark(const Problem& problem, const BenchmarkMatrix& matrix);

/// report.json plus plot_data.csv with columns
///   solver,sn_order,ke,iteration,k,flux_change_norm,seconds,normalized_time
void write_benchmark(const std::filesystem::path& dir, const BenchmarkReport& report);
std::string benchmark_json(const BenchmarkReport& report);

}  // namespace slabsn
