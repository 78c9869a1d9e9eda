// slab-sn: command-line front end for the slab S_N solvers.
//
//   slab-sn fixed INPUT --out DIR [--source constant|abs_x|file] ...
//   slab-sn eigen INPUT --out DIR [--solver analytic|sweep] [--ke X|none] ...
//   slab-sn bench INPUT --out DIR [--solvers ...] [--sn ...] [--ke ...]
//
// Exit status: 0 success, 1 usage, 2 input error, 3 solver error,
// 4 benchmark finished with failed cells.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "slabsn/analytic.hpp"
#include "slabsn/bench.hpp"
#include "slabsn/eigen_driver.hpp"
#include "slabsn/error.hpp"
#include "slabsn/output.hpp"
#include "slabsn/problem_io.hpp"
#include "slabsn/sweep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitPartial = 4;

struct CommonOptions {
  std::string input;
  std::string out;
  std::string solver;
  std::string ke;
  int sn = 0;
  std::size_t mesh = 0;
  double tolerance = 0.0;
  bool dump_spectra = false;
};

void report_error(const slabsn::Error& e) {
  json j{{"error", std::string(slabsn::to_string(e.kind()))}, {"message", e.what()}};
  std::cerr << j.dump() << '\n';
}

std::optional<double> parse_shift(const std::string& s) {
  if (s == "none" || s.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw slabsn::Error(slabsn::ErrorKind::InvalidArgument, "bad --ke value '" + s + "'");
  return v;
}

slabsn::Problem load_with_overrides(const CommonOptions& o) {
  auto p = slabsn::load_problem(o.input);
  if (!o.solver.empty()) p.config.solver = slabsn::solver_kind_from_string(o.solver);
  if (!o.ke.empty()) p.config.ke = parse_shift(o.ke);
  if (o.sn > 0) p.config.sn_order = o.sn;
  if (o.mesh > 0) p.config.mesh_cells = o.mesh;
  if (o.tolerance > 0.0) p.config.tolerance = o.tolerance;
  try {
    p.validate();
  } catch (const slabsn::Error& e) {
    throw slabsn::Error(e.kind(), std::string("after command-line overrides: ") + e.what());
  }
  fs::create_directories(o.out);
  return p;
}

void dump_spectra(const slabsn::Problem& p, const fs::path& dir, double fission_scale) {
  const auto quad = slabsn::gauss_legendre(p.config.sn_order);
  for (const auto& m : p.materials) {
    const auto t = slabsn::assemble_transport_matrix(m, quad, fission_scale);
    slabsn::dump_spectrum(dir, m.name, t.A, slabsn::block_diagonalize(t));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw slabsn::Error(slabsn::ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
  out << text;
}

// Per-cell source table: one row per fine cell with 1, G or NG columns.
slabsn::SourceField read_source_table(const fs::path& path, const slabsn::FineMesh& mesh, std::size_t groups,
                                      std::size_t ordinates) {
  std::ifstream in(path);
  if (!in) throw slabsn::Error(slabsn::ErrorKind::InvalidArgument, "cannot open source file '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw slabsn::Error(slabsn::ErrorKind::Parse,
                          path.string() + ":" + std::to_string(lineno) + ": non-numeric value");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() != mesh.cells()) {
    throw slabsn::Error(slabsn::ErrorKind::Validation, "source file has " + std::to_string(rows.size()) +
                                                           " rows, expected one per cell (" +
                                                           std::to_string(mesh.cells()) + ")");
  }
  const std::size_t dim = groups * ordinates;
  slabsn::SourceField s;
  s.mesh = mesh;
  s.values.resize(static_cast<Eigen::Index>(mesh.cells()), static_cast<Eigen::Index>(dim));
  for (std::size_t m = 0; m < rows.size(); ++m) {
    const auto& r = rows[m];
    for (std::size_t c = 0; c < dim; ++c) {
      double v = 0.0;
      if (r.size() == 1) {
        v = r[0];
      } else if (r.size() == groups) {
        v = r[c / ordinates];
      } else if (r.size() == dim) {
        v = r[c];
      } else {
        throw slabsn::Error(slabsn::ErrorKind::Validation,
                            "source file rows need 1, G or NG columns");
      }
      s.values(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return s;
}

int cmd_fixed(const CommonOptions& o, const std::string& shape, double value, const std::string& file) {
  const auto p = load_with_overrides(o);
  const fs::path out(o.out);
  const auto t0 = std::chrono::steady_clock::now();
  const auto quad = slabsn::gauss_legendre(p.config.sn_order);
  const auto mesh = slabsn::build_fine_mesh(p.geometry, p.config.mesh_cells);
  const std::size_t dim = p.groups() * quad.size();

  slabsn::SourceField source;
  if (shape == "constant") {
    source = slabsn::initial_source(mesh, dim, slabsn::InitialSource::flat, value);
  } else if (shape == "abs_x") {
    source = slabsn::initial_source(mesh, dim, slabsn::InitialSource::abs_x, value);
  } else if (shape == "file") {
    if (file.empty()) throw slabsn::Error(slabsn::ErrorKind::InvalidArgument, "--source file needs --source-file");
    source = read_source_table(file, mesh, p.groups(), quad.size());
  } else {
    throw slabsn::Error(slabsn::ErrorKind::InvalidArgument, "unknown source shape '" + shape + "'");
  }

  double setup = 0.0;
  double solve = 0.0;
  long sweeps = 0;
  slabsn::FluxField flux;
  if (p.config.solver == slabsn::SolverKind::analytic) {
    const auto solver = slabsn::AnalyticSolver::from_problem(p, quad, mesh, 0.0);
    setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    flux = solver.evaluate_centers(solver.solve(source));
  } else {
    const slabsn::SweepSolver solver(p, quad, mesh, 0.0);
    setup = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    auto sol = solver.solve(source, p.config.tolerance);
    sweeps = sol.iterations;
    flux = slabsn::make_flux_field(mesh.centers(), std::move(sol.psi), quad, p.groups());
  }
  solve = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() - setup;

  double total = 0.0;
  for (std::size_t m = 0; m < mesh.cells(); ++m) total += mesh.width(m) * flux.phi.row(static_cast<Eigen::Index>(m)).sum();
  slabsn::write_flux_csv(out / "flux.csv", flux);
  json j;
  j["schema_version"] = slabsn::kSchemaVersion;
  j["mode"] = "fixed";
  j["solver_kind"] = slabsn::to_string(p.config.solver);
  j["sn_order"] = p.config.sn_order;
  j["mesh_cells"] = p.config.mesh_cells;
  j["source"] = shape;
  j["total_scalar_flux"] = total;
  j["inner_sweeps"] = sweeps;
  j["timing"] = {{"setup_seconds", setup}, {"solve_seconds", solve}, {"total_seconds", setup + solve}};
  write_text(out / "summary.json", j.dump(2) + "\n");
  if (o.dump_spectra) dump_spectra(p, out, 0.0);
  std::cout << "wrote " << (out / "flux.csv").string() << " and summary.json\n";
  return 0;
}

int cmd_eigen(const CommonOptions& o) {
  const auto p = load_with_overrides(o);
  const fs::path out(o.out);
  const auto result = slabsn::power_iteration(p);
  write_text(out / "result.json", slabsn::result_json(result));
  slabsn::write_history_csv(out / "history.csv", result);
  slabsn::write_flux_csv(out / "flux.csv", result.flux);
  if (o.dump_spectra) dump_spectra(p, out, p.config.ke ? 1.0 / *p.config.ke : 0.0);
  std::cout << "k_eff = " << slabsn::format_double(result.k_eff) << " after " << result.iterations
            << " outer iterations\n";
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_bench(const CommonOptions& o, const std::string& solvers, const std::string& orders,
              const std::string& shifts, bool parallel) {
  const auto p = load_with_overrides(o);
  slabsn::BenchmarkMatrix matrix;
  matrix.parallel = parallel;
  matrix.solvers.clear();
  for (const auto& s : split_list(solvers)) matrix.solvers.push_back(slabsn::solver_kind_from_string(s));
  matrix.orders.clear();
  for (const auto& s : split_list(orders)) {
    try {
      matrix.orders.push_back(std::stoi(s));
    } catch (const std::exception&) {
      throw slabsn::Error(slabsn::ErrorKind::InvalidArgument, "bad --sn entry '" + s + "'");
    }
  }
  matrix.shifts.clear();
  for (const auto& s : split_list(shifts)) matrix.shifts.push_back(parse_shift(s));
  if (matrix.solvers.empty() || matrix.orders.empty() || matrix.shifts.empty()) {
    throw slabsn::Error(slabsn::ErrorKind::InvalidArgument, "benchmark matrix is empty");
  }
  const auto report = slabsn::run_benchmark(p, matrix);
  slabsn::write_benchmark(o.out, report);
  for (const auto& c : report.cells) {
    std::cout << c.label() << ": ";
    if (c.converged) {
      std::cout << "k=" << slabsn::format_double(c.result.k_eff) << " it=" << c.result.iterations
                << " t=" << c.total_seconds() << "s\n";
    } else {
      std::cout << "FAILED " << c.error << '\n';
    }
  }
  for (const auto& s : report.speedups) std::cout << s.cell << " vs " << s.baseline << ": " << s.ratio << "x\n";
  return report.failures().empty() ? 0 : kExitPartial;
}

void add_common(CLI::App* cmd, CommonOptions& o, bool single_order = true) {
  cmd->add_option("input", o.input, "problem file")->required();
  cmd->add_option("-o,--out", o.out, "output directory")->required();
  if (single_order) cmd->add_option("--sn", o.sn, "S_N order override");
  cmd->add_option("--mesh", o.mesh, "fine mesh cell count override");
  cmd->add_option("--tolerance", o.tolerance, "convergence tolerance override");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slab-geometry multigroup S_N transport: analytic and sweeping solvers"};
  app.require_subcommand(1);

  CommonOptions fixed_opts;
  std::string shape = "constant";
  double value = 1.0;
  std::string source_file;
  auto* fixed = app.add_subcommand("fixed", "solve a fixed-source problem");
  add_common(fixed, fixed_opts);
  fixed->add_option("--solver", fixed_opts.solver, "analytic or sweep");
  fixed->add_option("--source", shape, "constant, abs_x or file")->check(CLI::IsMember({"constant", "abs_x", "file"}));
  fixed->add_option("--value", value, "scale of the built-in source shapes");
  fixed->add_option("--source-file", source_file, "per-cell source CSV (1, G or NG columns)");
  fixed->add_flag("--dump-spectra", fixed_opts.dump_spectra, "write A, P, B per material as CSV");

  CommonOptions eigen_opts;
  auto* eigen = app.add_subcommand("eigen", "power iteration for k_eff");
  add_common(eigen, eigen_opts);
  eigen->add_option("--solver", eigen_opts.solver, "analytic or sweep");
  eigen->add_option("--ke", eigen_opts.ke, "Wielandt shift k_e, or 'none'");
  eigen->add_flag("--dump-spectra", eigen_opts.dump_spectra, "write A, P, B per material as CSV");

  CommonOptions bench_opts;
  std::string solvers = "analytic,sweep";
  std::string orders = "2,4,8,16";
  std::string shifts = "none";
  bool parallel = false;
  auto* bench = app.add_subcommand("bench", "analytic vs sweep benchmark matrix");
  add_common(bench, bench_opts, false);
  bench->add_option("--solvers", solvers, "comma-separated solver kinds");
  bench->add_option("--sn", orders, "comma-separated S_N orders");
  bench->add_option("--ke", shifts, "comma-separated shifts ('none' for no shift)");
  bench->add_flag("--parallel", parallel, "run cells concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*fixed) return cmd_fixed(fixed_opts, shape, value, source_file);
    if (*eigen) return cmd_eigen(eigen_opts);
    if (*bench) return cmd_bench(bench_opts, solvers, orders, shifts, parallel);
  } catch (const slabsn::Error& e) {
    report_error(e);
    return e.is_input_error() ? kExitInput : kExitSolver;
  } catch (const fs::filesystem_error& e) {
    report_error(slabsn::Error(slabsn::ErrorKind::InvalidArgument, e.what()));
    return kExitInput;
  }
  return kExitUsage;
}
