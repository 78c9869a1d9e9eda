#include "slabsn/material.hpp"

#include <cmath>

#include "slabsn/error.hpp"

namespace slabsn {

bool MaterialXS::fissile() const {
  for (double v : nu_sigma_f) {
    if (v > 0.0) return true;
  }
  return false;
}

void MaterialXS::validate() const {
  const std::string where = "material '" + name + "': ";
  const std::size_t g = groups();
  if (g == 0) throw Error(ErrorKind::Validation, where + "sigma_t is empty");
  if (sigma_s.size() != g || nu_sigma_f.size() != g || chi.size() != g) {
    throw Error(ErrorKind::Validation, where + "group count mismatch between fields");
  }
  auto check_nonneg = [&](double v, const char* field) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::Validation, where + field + " entries must be finite and >= 0");
    }
  };
  for (std::size_t i = 0; i < g; ++i) {
    check_nonneg(sigma_t[i], "sigma_t");
    check_nonneg(nu_sigma_f[i], "nu_sigma_f");
    check_nonneg(chi[i], "chi");
    if (sigma_s[i].size() != g) {
      throw Error(ErrorKind::Validation, where + "sigma_s must be G x G");
    }
    for (double v : sigma_s[i]) check_nonneg(v, "sigma_s");
  }
  if (fissile()) {
    double s = 0.0;
    for (double c : chi) s += c;
    if (std::abs(s - 1.0) > 1e-12) {
      throw Error(ErrorKind::Validation, where + "chi must sum to 1 in a fissile material");
    }
  }
  if (scattering_kernel) {
    const auto& k = *scattering_kernel;
    if (k.rows() != k.cols() || k.rows() % static_cast<Eigen::Index>(g) != 0) {
      throw Error(ErrorKind::Validation, where + "scattering_kernel must be NG x NG");
    }
    if (!k.allFinite() || (k.array() < 0.0).any()) {
      throw Error(ErrorKind::Validation, where + "scattering_kernel entries must be finite and >= 0");
    }
  }
}

bool MaterialXS::operator==(const MaterialXS& o) const {
  if (scattering_kernel.has_value() != o.scattering_kernel.has_value()) return false;
  if (scattering_kernel && *scattering_kernel != *o.scattering_kernel) return false;
  return name == o.name && sigma_t == o.sigma_t && sigma_s == o.sigma_s &&
         nu_sigma_f == o.nu_sigma_f && chi == o.chi;
}

}  // namespace slabsn
