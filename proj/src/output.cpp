#include "slabsn/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "slabsn/error.hpp"

namespace slabsn {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_flux_csv(std::ostream& out, const FluxField& flux) {
  const std::size_t N = flux.ordinates;
  out << "x,group";
  for (std::size_t n = 1; n <= N; ++n) out << ",psi_" << n;
  out << ",phi\n";
  for (std::size_t p = 0; p < flux.points.size(); ++p) {
    for (std::size_t g = 0; g < flux.groups; ++g) {
      out << format_double(flux.points[p]) << ',' << (g + 1);
      for (std::size_t n = 0; n < N; ++n) {
        out << ',' << format_double(flux.psi(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(g * N + n)));
      }
      out << ',' << format_double(flux.phi(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(g))) << '\n';
    }
  }
}

void write_flux_csv(const std::filesystem::path& path, const FluxField& flux) {
  auto out = open_out(path);
  write_flux_csv(out, flux);
}

void write_history_csv(const std::filesystem::path& path, const EigenResult& result) {
  auto out = open_out(path);
  out << "iteration,k,flux_change_norm,cumulative_seconds\n";
  for (const auto& h : result.history) {
    out << h.iteration << ',' << format_double(h.k) << ','
        << (std::isnan(h.flux_change) ? std::string("nan") : format_double(h.flux_change)) << ','
        << format_double(h.seconds) << '\n';
  }
}

std::string result_json(const EigenResult& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["k_eff"] = r.k_eff;
  j["iterations"] = r.iterations;
  j["converged"] = true;
  j["tolerance"] = r.tolerance;
  j["solver_kind"] = to_string(r.solver);
  j["ke"] = r.ke ? json(*r.ke) : json(nullptr);
  j["sn_order"] = r.sn_order;
  j["mesh_cells"] = r.mesh_cells;
  j["final_flux_change"] = r.history.empty() ? 0.0 : r.history.back().flux_change;
  j["inner_sweeps"] = r.inner_sweeps;
  j["timing"] = {{"setup_seconds", r.setup_seconds},
                 {"solve_seconds", r.solve_seconds},
                 {"total_seconds", r.setup_seconds + r.solve_seconds},
                 {"seconds_per_iteration", r.iterations > 0 ? r.solve_seconds / r.iterations : 0.0}};
  return j.dump(2) + "\n";
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void dump_spectrum(const std::filesystem::path& dir, const std::string& prefix, const Eigen::MatrixXd& A,
                   const BlockSpectrum& spectrum) {
  write_matrix_csv(dir / (prefix + "_A.csv"), A);
  write_matrix_csv(dir / (prefix + "_P.csv"), spectrum.P);
  write_matrix_csv(dir / (prefix + "_B.csv"), spectrum.B());
}

}  // namespace slabsn
