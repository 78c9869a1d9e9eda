#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "slabsn/bench.hpp"
#include "slabsn/eigen_driver.hpp"
#include "slabsn/output.hpp"
#include "slabsn/quadrature.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using Eigen::Index;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("slabsn_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

slabsn::Problem small_pincell() {
  auto p = testing::pincell();
  p.config.sn_order = 2;
  p.config.mesh_cells = 140;
  return p;
}

}  // namespace

TEST_CASE("flux CSV layout and exact round trip") {
  const auto quad = slabsn::gauss_legendre(4);
  testing::Gen gen(2);
  const Eigen::MatrixXd psi = testing::Gen(3).matrix(3, 8);
  const auto flux = slabsn::make_flux_field({0.1, 0.2 + 1e-17, 1.0 / 3.0}, psi, quad, 2);
  std::stringstream ss;
  slabsn::write_flux_csv(ss, flux);
  std::vector<std::string> lines;
  for (std::string line; std::getline(ss, line);) lines.push_back(line);
  REQUIRE(lines.size() == 1 + 3 * 2);
  CHECK(lines[0] == "x,group,psi_1,psi_2,psi_3,psi_4,phi");
  for (std::size_t row = 1; row < lines.size(); ++row) {
    std::stringstream ls(lines[row]);
    std::vector<std::string> cells;
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 7);
    const std::size_t p = (row - 1) / 2;
    const std::size_t g = (row - 1) % 2;
    CHECK(std::stod(cells[0]) == flux.points[p]);
    CHECK(std::stoi(cells[1]) == static_cast<int>(g + 1));
    for (std::size_t n = 0; n < 4; ++n)
      CHECK(std::stod(cells[2 + n]) == psi(static_cast<Index>(p), static_cast<Index>(g * 4 + n)));
    CHECK(std::stod(cells[6]) == flux.phi(static_cast<Index>(p), static_cast<Index>(g)));
  }
}

TEST_CASE("result JSON and history CSV") {
  const auto p = small_pincell();
  const auto r = slabsn::power_iteration(p);
  const auto j = nlohmann::json::parse(slabsn::result_json(r));
  CHECK(j["schema_version"] == 1);
  CHECK(j["k_eff"].get<double>() == r.k_eff);
  CHECK(j["iterations"] == r.iterations);
  CHECK(j["solver_kind"] == "analytic");
  CHECK(j["ke"].is_null());
  CHECK(j["sn_order"] == 2);
  CHECK(j["timing"]["total_seconds"].get<double>() >= j["timing"]["solve_seconds"].get<double>());

  const auto dir = scratch_dir("history");
  slabsn::write_history_csv(dir / "history.csv", r);
  const auto lines = lines_of(dir / "history.csv");
  REQUIRE(lines.size() == static_cast<std::size_t>(r.iterations) + 1);
  CHECK(lines[0] == "iteration,k,flux_change_norm,cumulative_seconds");
  CHECK(lines[1].rfind("1,1,nan,", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("spectrum dump") {
  const auto dir = scratch_dir("dump");
  const auto t = slabsn::assemble_transport_matrix(testing::core_material(), slabsn::gauss_legendre(4), 0.0);
  slabsn::dump_spectrum(dir, "core", t.A, slabsn::block_diagonalize(t));
  for (const char* f : {"core_A.csv", "core_P.csv", "core_B.csv"}) {
    const auto lines = lines_of(dir / f);
    CHECK(lines.size() == 8);
    CHECK(std::count(lines[0].begin(), lines[0].end(), ',') == 7);
  }
  fs::remove_all(dir);
}

TEST_CASE("numerics are bit-identical between runs") {
  const auto p = small_pincell();
  const auto a = slabsn::power_iteration(p);
  const auto b = slabsn::power_iteration(p);
  CHECK(a.k_eff == b.k_eff);
  CHECK(a.flux.psi == b.flux.psi);
  auto s = p;
  s.config.solver = slabsn::SolverKind::sweep;
  CHECK(slabsn::power_iteration(s).k_eff == slabsn::power_iteration(s).k_eff);
}

TEST_CASE("single-cell benchmark has no ratios") {
  slabsn::BenchmarkMatrix m;
  m.solvers = {slabsn::SolverKind::analytic};
  m.orders = {2};
  const auto report = slabsn::run_benchmark(small_pincell(), m);
  REQUIRE(report.cells.size() == 1);
  CHECK(report.cells[0].converged);
  CHECK(report.speedups.empty());
  CHECK(report.failures().empty());
  CHECK(report.time_unit_cell == "analytic/S2/noshift");
}

TEST_CASE("benchmark records failed cells and keeps going") {
  auto p = small_pincell();
  p.config.max_inner = 1000;
  slabsn::BenchmarkMatrix m;
  m.orders = {2};
  m.shifts = {std::nullopt, 1.3};
  const auto report = slabsn::run_benchmark(p, m);
  REQUIRE(report.cells.size() == 4);
  const auto failures = report.failures();
  REQUIRE(failures.size() == 1);
  CHECK(failures[0].rfind("sweep/S2/ke=1.3", 0) == 0);
  CHECK(report.speedups.size() == 2);  // both analytic cells against the unshifted sweep

  const auto dir = scratch_dir("bench");
  slabsn::write_benchmark(dir, report);
  const auto j = nlohmann::json::parse(std::ifstream(dir / "report.json"));
  CHECK(j["cells"].size() == 4);
  CHECK(j["failures"].size() == 1);
  const auto plot = lines_of(dir / "plot_data.csv");
  CHECK(plot[0] == "solver,sn_order,ke,iteration,k,flux_change_norm,seconds,normalized_time");
  std::size_t rows = 0;
  for (const auto& c : report.cells)
    if (c.converged) rows += c.result.history.size();
  CHECK(plot.size() == rows + 1);
  fs::remove_all(dir);
}

TEST_CASE("parallel benchmark gives the same numbers") {
  slabsn::BenchmarkMatrix m;
  m.orders = {2, 4};
  const auto seq = slabsn::run_benchmark(small_pincell(), m);
  m.parallel = true;
  const auto par = slabsn::run_benchmark(small_pincell(), m);
  REQUIRE(seq.cells.size() == par.cells.size());
  for (std::size_t i = 0; i < seq.cells.size(); ++i) {
    CHECK(seq.cells[i].label() == par.cells[i].label());
    CHECK(seq.cells[i].result.k_eff == par.cells[i].result.k_eff);
  }
  CHECK(nlohmann::json::parse(slabsn::benchmark_json(par)).contains("note"));
}
