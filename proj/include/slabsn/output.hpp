#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "slabsn/eigen_driver.hpp"
#include "slabsn/fields.hpp"
#include "slabsn/spectral.hpp"

namespace slabsn {

inline constexpr int kSchemaVersion = 1;

/// Flux CSV, one row per (point, group):
///   x,group,psi_1,...,psi_N,phi
/// group is 1-based, psi_n follows ascending mu. Numbers use %.17g so a
/// file round-trips doubles exactly.
void write_flux_csv(std::ostream& out, const FluxField& flux);
void write_flux_csv(const std::filesystem::path& path, const FluxField& flux);

/// iteration,k,flux_change_norm,cumulative_seconds
void write_history_csv(const std::filesystem::path& path, const EigenResult& result);

/// Eigenvalue run summary (see schemas/result.schema.json).
std::string result_json(const EigenResult& result);

/// Dense matrix as CSV without header.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// A.csv, P.csv, B.csv for one material into `dir` with the given prefix.
void dump_spectrum(const std::filesystem::path& dir, const std::string& prefix, const Eigen::MatrixXd& A,
                   const BlockSpectrum& spectrum);

std::string format_double(double v);

}  // namespace slabsn
