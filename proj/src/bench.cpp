#include "slabsn/bench.hpp"

#include <cmath>
#include <fstream>
#include <future>
#include <nlohmann/json.hpp>

#include "slabsn/error.hpp"
#include "slabsn/output.hpp"

namespace slabsn {

using json = nlohmann::ordered_json;

std::string BenchmarkCell::label() const {
  return to_string(solver) + "/S" + std::to_string(sn_order) + "/" +
         (ke ? "ke=" + format_double(*ke) : std::string("noshift"));
}

std::vector<std::string> BenchmarkReport::failures() const {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (!c.converged) out.push_back(c.label() + ": " + c.error);
  }
  return out;
}

namespace {

BenchmarkCell run_cell(const Problem& base, SolverKind solver, int order, std::optional<double> ke) {
  BenchmarkCell cell;
  cell.solver = solver;
  cell.sn_order = order;
  cell.ke = ke;
  Problem p = base;
  p.config.solver = solver;
  p.config.sn_order = order;
  p.config.ke = ke;
  PowerIterationOptions opts;
  opts.warmup = true;
  try {
    cell.result = power_iteration(p, opts);
    cell.converged = true;
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

BenchmarkReport run_benchmark(const Problem& problem, const BenchmarkMatrix& matrix) {
  BenchmarkReport report;
  report.tolerance = problem.config.tolerance;
  report.mesh_cells = problem.config.mesh_cells;
  report.parallel = matrix.parallel;

  if (matrix.parallel) {
    std::vector<std::future<BenchmarkCell>> futures;
    for (auto s : matrix.solvers)
      for (int n : matrix.orders)
        for (auto ke : matrix.shifts)
          futures.push_back(std::async(std::launch::async, run_cell, std::cref(problem), s, n, ke));
    for (auto& f : futures) report.cells.push_back(f.get());
  } else {
    for (auto s : matrix.solvers)
      for (int n : matrix.orders)
        for (auto ke : matrix.shifts) report.cells.push_back(run_cell(problem, s, n, ke));
  }

  // Baseline per order: the unshifted sweep cell.
  for (const auto& base : report.cells) {
    if (!base.converged || base.solver != SolverKind::sweep || base.ke) continue;
    for (const auto& c : report.cells) {
      if (&c == &base || !c.converged || c.sn_order != base.sn_order) continue;
      report.speedups.push_back({base.label(), c.label(), base.total_seconds() / c.total_seconds()});
    }
  }

  // Plot time unit: mean iteration time of the highest-order unshifted
  // analytic cell, else of the first converged cell.
  const BenchmarkCell* unit = nullptr;
  for (const auto& c : report.cells) {
    if (c.converged && c.solver == SolverKind::analytic && !c.ke &&
        (!unit || c.sn_order > unit->sn_order)) {
      unit = &c;
    }
  }
  for (const auto& c : report.cells) {
    if (!unit && c.converged) unit = &c;
  }
  if (unit) {
    report.time_unit_cell = unit->label();
    report.time_unit_seconds = unit->result.solve_seconds / unit->result.iterations;
  }
  return report;
}

std::string benchmark_json(const BenchmarkReport& report) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["tolerance"] = report.tolerance;
  j["mesh_cells"] = report.mesh_cells;
  j["parallel"] = report.parallel;
  if (report.parallel) j["note"] = "cells ran concurrently; timings include contention";
  j["time_unit"] = {{"cell", report.time_unit_cell}, {"seconds", report.time_unit_seconds}};
  json cells = json::array();
  for (const auto& c : report.cells) {
    json jc;
    jc["label"] = c.label();
    jc["solver_kind"] = to_string(c.solver);
    jc["sn_order"] = c.sn_order;
    jc["ke"] = c.ke ? json(*c.ke) : json(nullptr);
    jc["converged"] = c.converged;
    if (c.converged) {
      const auto& r = c.result;
      jc["k_eff"] = r.k_eff;
      jc["iterations"] = r.iterations;
      jc["setup_seconds"] = r.setup_seconds;
      jc["solve_seconds"] = r.solve_seconds;
      jc["total_seconds"] = c.total_seconds();
      jc["seconds_per_iteration"] = r.solve_seconds / r.iterations;
      jc["inner_sweeps"] = r.inner_sweeps;
      json traj = json::array();
      for (const auto& h : r.history) {
        traj.push_back(std::isnan(h.flux_change) ? json(nullptr) : json(h.flux_change));
      }
      jc["flux_change_trajectory"] = traj;
    } else {
      jc["error"] = c.error;
    }
    cells.push_back(jc);
  }
  j["cells"] = cells;
  json speedups = json::array();
  for (const auto& s : report.speedups) {
    speedups.push_back({{"baseline", s.baseline}, {"cell", s.cell}, {"ratio", s.ratio}});
  }
  j["speedups"] = speedups;
  j["failures"] = report.failures();
  return j.dump(2) + "\n";
}

void write_benchmark(const std::filesystem::path& dir, const BenchmarkReport& report) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json");
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write report.json");
    out << benchmark_json(report);
  }
  std::ofstream csv(dir / "plot_data.csv");
  if (!csv) throw Error(ErrorKind::InvalidArgument, "cannot write plot_data.csv");
  csv << "solver,sn_order,ke,iteration,k,flux_change_norm,seconds,normalized_time\n";
  for (const auto& c : report.cells) {
    if (!c.converged) continue;
    for (const auto& h : c.result.history) {
      csv << to_string(c.solver) << ',' << c.sn_order << ',' << (c.ke ? format_double(*c.ke) : "none") << ','
          << h.iteration << ',' << format_double(h.k) << ','
          << (std::isnan(h.flux_change) ? std::string("nan") : format_double(h.flux_change)) << ','
          << format_double(h.seconds) << ','
          << format_double(report.time_unit_seconds > 0 ? h.seconds / report.time_unit_seconds : 0.0) << '\n';
    }
  }
}

}  // namespace slabsn
