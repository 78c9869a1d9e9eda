#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "slabsn/problem.hpp"
#include "slabsn/problem_io.hpp"
#include "slabsn/spectral.hpp"

namespace testing {

inline std::string data_path(const std::string& name) { return std::string(SLABSN_DATA_DIR) + "/" + name; }
inline std::string fixture_path(const std::string& name) {
  return std::string(SLABSN_FIXTURE_DIR) + "/" + name;
}

inline slabsn::Problem pincell() { return slabsn::load_problem(data_path("pincell_reflector.json")); }

// Table 1 values typed in again here, so tests do not depend on the fixture.
inline slabsn::MaterialXS core_material() {
  slabsn::MaterialXS m;
  m.name = "core";
  m.sigma_t = {6.8294e-01, 2.0658e+00};
  m.sigma_s = {{6.4870e-01, 2.5869e-02}, {4.2114e-04, 1.9696e+00}};
  m.nu_sigma_f = {6.0427e-03, 1.5343e-01};
  m.chi = {1.0, 0.0};
  return m;
}

inline slabsn::MaterialXS reflector_material() {
  slabsn::MaterialXS m;
  m.name = "reflector";
  m.sigma_t = {8.9176e-01, 3.0361e+00};
  m.sigma_s = {{8.4530e-01, 4.6078e-02}, {2.8498e-04, 3.0181e+00}};
  m.nu_sigma_f = {0.0, 0.0};
  m.chi = {0.0, 0.0};
  return m;
}

inline slabsn::MaterialXS one_group(double sigma_t, double sigma_s, double nu_sigma_f = 0.0) {
  slabsn::MaterialXS m;
  m.name = "m";
  m.sigma_t = {sigma_t};
  m.sigma_s = {{sigma_s}};
  m.nu_sigma_f = {nu_sigma_f};
  m.chi = {nu_sigma_f > 0.0 ? 1.0 : 0.0};
  return m;
}

inline slabsn::Problem single_region(const slabsn::MaterialXS& mat, double x0, double x1, int order,
                                     std::size_t cells) {
  slabsn::Problem p;
  p.materials = {mat};
  p.geometry.edges = {x0, x1};
  p.geometry.region_material = {0};
  p.config.sn_order = order;
  p.config.mesh_cells = cells;
  return p;
}

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  Eigen::MatrixXd matrix(Eigen::Index rows, Eigen::Index cols, double a = -1.0, double b = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform(a, b);
    return m;
  }
  Eigen::VectorXd vector(Eigen::Index n, double a = -1.0, double b = 1.0) { return matrix(n, 1, a, b); }

 private:
  std::mt19937_64 rng_;
};

// Random blocks (real and complex pairs) with a basis close to orthogonal, so
// the result is well conditioned. zero_block forces one eigenvalue to 0.
inline slabsn::BlockSpectrum random_spectrum(Gen& gen, Eigen::Index dim, bool zero_block = false) {
  std::vector<slabsn::SpectralBlock> blocks;
  Eigen::Index col = 0;
  while (col < dim) {
    slabsn::SpectralBlock b;
    b.column = col;
    b.re = gen.uniform(-2.0, 2.0);
    if (col + 1 < dim && gen.uniform(0.0, 1.0) < 0.4) {
      b.kind = slabsn::SpectralBlock::Kind::complex_pair;
      b.im = gen.uniform(0.1, 3.0);
    }
    if (zero_block && col == 0) {
      b.kind = slabsn::SpectralBlock::Kind::real;
      b.re = 0.0;
      b.im = 0.0;
    }
    blocks.push_back(b);
    col += b.size();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gen.matrix(dim, dim));
  Eigen::MatrixXd Q = qr.householderQ();
  Eigen::MatrixXd P = Q * (Eigen::MatrixXd::Identity(dim, dim) + 0.2 * gen.matrix(dim, dim));
  return slabsn::make_spectrum(P, blocks);
}

// Adaptive Simpson with Richardson correction.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                               int depth = 50) {
  std::function<double(double, double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, double eps, int d) {
        const double mid = 0.5 * (lo + hi);
        const double lm = 0.5 * (lo + mid);
        const double rm = 0.5 * (mid + hi);
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
        const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
        const double delta = left + right - whole;
        if (d <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
        return rec(lo, mid, flo, flm, fmid, left, 0.5 * eps, d - 1) +
               rec(mid, hi, fmid, frm, fhi, right, 0.5 * eps, d - 1);
      };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, depth);
}

// Two-group infinite-medium multiplication factor: largest eigenvalue of
// L^{-1} F with L = diag(sigma_t) - S^T and F = chi nuSigma_f^T.
inline double k_infinity(const slabsn::MaterialXS& m) {
  const double a11 = m.sigma_t[0] - m.sigma_s[0][0];
  const double a12 = -m.sigma_s[1][0];
  const double a21 = -m.sigma_s[0][1];
  const double a22 = m.sigma_t[1] - m.sigma_s[1][1];
  const double det = a11 * a22 - a12 * a21;
  // flux shape per unit fission source chi: phi = L^{-1} chi
  const double phi1 = (a22 * m.chi[0] - a12 * m.chi[1]) / det;
  const double phi2 = (-a21 * m.chi[0] + a11 * m.chi[1]) / det;
  return m.nu_sigma_f[0] * phi1 + m.nu_sigma_f[1] * phi2;
}

}  // namespace testing
