#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace slabsn {

/// Multigroup macroscopic cross sections for one homogeneous material (cm^-1).
struct MaterialXS {
  std::string name;
  std::vector<double> sigma_t;
  /// sigma_s[from][to], i.e. row g' holds scattering g' -> g.
  std::vector<std::vector<double>> sigma_s;
  std::vector<double> nu_sigma_f;
  std::vector<double> chi;
  /// Optional full angular kernel Sigma_s(g'n' -> gn), rows gn, columns g'n',
  /// group-major. Replaces the isotropic sigma_s/2 expansion when present.
  std::optional<Eigen::MatrixXd> scattering_kernel;

  std::size_t groups() const { return sigma_t.size(); }
  bool fissile() const;

  /// Throws Validation on negative entries, shape mismatches, or a fission
  /// spectrum that does not sum to one in a fissile material.
  void validate() const;

  bool operator==(const MaterialXS&) const;
};

}  // namespace slabsn
