#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "slabsn/error.hpp"
#include "slabsn/quadrature.hpp"
#include "slabsn/spectral.hpp"
#include "support.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;
using slabsn::SpectralBlock;

namespace {

double rel_residual(const MatrixXd& A, const slabsn::BlockSpectrum& s) {
  return (A * s.P - s.P * s.B()).norm() / A.norm();
}

SpectralBlock real_block(double l, Eigen::Index col = 0) {
  SpectralBlock b;
  b.re = l;
  b.column = col;
  return b;
}

SpectralBlock pair_block(double a, double b, Eigen::Index col = 0) {
  SpectralBlock k;
  k.kind = SpectralBlock::Kind::complex_pair;
  k.re = a;
  k.im = b;
  k.column = col;
  return k;
}

}  // namespace

TEST_CASE("pure absorber S2 matrix is diagonal") {
  const auto t = slabsn::assemble_transport_matrix(testing::one_group(1.0, 0.0), slabsn::gauss_legendre(2), 0.0);
  const double s3 = std::sqrt(3.0);
  CHECK(t.A(0, 0) == doctest::Approx(s3).epsilon(1e-15));
  CHECK(t.A(1, 1) == doctest::Approx(-s3).epsilon(1e-15));
  CHECK(t.A(0, 1) == 0.0);
  CHECK(t.A(1, 0) == 0.0);

  const auto s = slabsn::block_diagonalize(t);
  REQUIRE(s.blocks.size() == 2);
  CHECK(s.blocks[0].kind == SpectralBlock::Kind::real);
  CHECK(s.blocks[0].re == doctest::Approx(-s3));
  CHECK(s.blocks[1].re == doctest::Approx(s3));
  // columns are unit vectors up to scale
  CHECK(std::abs(s.P(0, 0)) < 1e-14);
  CHECK(std::abs(s.P(1, 1)) < 1e-14);
  CHECK(rel_residual(t.A, s) < 1e-14);
}

TEST_CASE("pure scatterer matrix is singular and nearly defective") {
  const auto t = slabsn::assemble_transport_matrix(testing::one_group(1.0, 1.0), slabsn::gauss_legendre(2), 0.0);
  CHECK((t.A * VectorXd::Ones(2)).norm() < 1e-15);
  // For G=1, S2 the matrix is nilpotent. Rounding splits the double zero
  // into a tiny complex pair with almost parallel eigenvectors.
  CHECK((t.A * t.A).norm() < 1e-14);
  const auto s = slabsn::block_diagonalize(t);
  CHECK(rel_residual(t.A, s) <= 1e-10);
  for (const auto& b : s.blocks) CHECK(std::abs(b.eigenvalue()) < 1e-6);
  CHECK(s.P.norm() * s.P_inv.norm() > 1e6);
}

TEST_CASE("exact Jordan blocks are rejected") {
  MatrixXd J2(2, 2);
  J2 << 0, 1, 0, 0;
  MatrixXd J3(3, 3);
  J3 << 2, 1, 0, 0, 2, 1, 0, 0, 2;
  for (const MatrixXd& J : {J2, J3}) {
    try {
      slabsn::block_diagonalize(J);
      FAIL("expected DefectiveOrIllConditioned");
    } catch (const slabsn::Error& e) {
      CHECK(e.kind() == slabsn::ErrorKind::DefectiveOrIllConditioned);
    }
  }
}

TEST_CASE("core S2 matrix matches the hand-assembled one") {
  const auto quad = slabsn::gauss_legendre(2);
  MatrixXd expected0(4, 4);
  expected0 << 0.62109609908612351, -0.5617906794349653, -0.00036471793854977845, -0.00036471793854977845,
      0.5617906794349653, -0.62109609908612351, 0.00036471793854977845, 0.00036471793854977845,
      -0.022403211170499641, -0.022403211170499641, 1.872346922981956, -1.7057236352938301,
      0.022403211170499641, 0.022403211170499641, 1.7057236352938301, -1.872346922981956;
  MatrixXd expected_shift(4, 4);
  expected_shift << 0.61707061315731715, -0.56581616536377166, -0.10257570078673932, -0.10257570078673932,
      0.56581616536377166, -0.61707061315731715, 0.10257570078673932, 0.10257570078673932,
      -0.022403211170499641, -0.022403211170499641, 1.872346922981956, -1.7057236352938301,
      0.022403211170499641, 0.022403211170499641, 1.7057236352938301, -1.872346922981956;
  const auto a0 = slabsn::assemble_transport_matrix(testing::core_material(), quad, 0.0);
  const auto a1 = slabsn::assemble_transport_matrix(testing::core_material(), quad, 1.0 / 1.3);
  CHECK((a0.A - expected0).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((a1.A - expected_shift).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reversing ordinates negates A") {
  for (int order : {2, 4, 8, 16}) {
    const auto quad = slabsn::gauss_legendre(order);
    for (double scale : {0.0, 1.0 / 1.3}) {
      const auto t = slabsn::assemble_transport_matrix(testing::core_material(), quad, scale);
      const auto NG = t.A.rows();
      const auto N = static_cast<Eigen::Index>(quad.size());
      Eigen::PermutationMatrix<Eigen::Dynamic> pi(NG);
      for (Eigen::Index r = 0; r < NG; ++r) pi.indices()(r) = static_cast<int>((r / N) * N + (N - 1 - r % N));
      CHECK((pi * t.A * pi.transpose() + t.A).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("isotropic kernel reproduces the default assembly") {
  const auto quad = slabsn::gauss_legendre(4);
  auto mat = testing::core_material();
  const auto plain = slabsn::assemble_transport_matrix(mat, quad, 0.5);
  MatrixXd K(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c) K(r, c) = 0.5 * mat.sigma_s[static_cast<std::size_t>(c / 4)][static_cast<std::size_t>(r / 4)];
  mat.scattering_kernel = K;
  const auto kern = slabsn::assemble_transport_matrix(mat, quad, 0.5);
  CHECK((plain.A - kern.A).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("rotation generator is one complex pair") {
  MatrixXd A(2, 2);
  A << 0, 1, -1, 0;
  const auto s = slabsn::block_diagonalize(A);
  REQUIRE(s.blocks.size() == 1);
  CHECK(s.blocks[0].kind == SpectralBlock::Kind::complex_pair);
  CHECK(std::abs(s.blocks[0].re) < 1e-15);
  CHECK(s.blocks[0].im == doctest::Approx(1.0));
  CHECK((s.B() - A).norm() < 1e-14);
  CHECK(rel_residual(A, s) < 1e-14);
}

TEST_CASE("shifted core S2 spectrum against the characteristic polynomial") {
  const auto t =
      slabsn::assemble_transport_matrix(testing::core_material(), slabsn::gauss_legendre(2), 1.0 / 1.3);
  const auto s = slabsn::block_diagonalize(t);
  CHECK(rel_residual(t.A, s) <= 1e-10);
  CHECK((s.P * s.P_inv - MatrixXd::Identity(4, 4)).norm() < 1e-12);

  // Faddeev-LeVerrier: det(lambda I - A) = l^4 + c1 l^3 + c2 l^2 + c3 l + c4.
  const MatrixXd& A = t.A;
  MatrixXd M = MatrixXd::Identity(4, 4);
  double c[5] = {1, 0, 0, 0, 0};
  for (int k = 1; k <= 4; ++k) {
    const MatrixXd AM = A * M;
    c[k] = -AM.trace() / k;
    M = AM + c[k] * MatrixXd::Identity(4, 4);
  }
  // The +-mu symmetry makes the polynomial even.
  CHECK(std::abs(c[1]) < 1e-12);
  CHECK(std::abs(c[3]) < 1e-12);
  // roots in l^2 from the quadratic
  const std::complex<double> disc = std::sqrt(std::complex<double>(c[2] * c[2] - 4 * c[4]));
  std::vector<std::complex<double>> roots;
  for (auto l2 : {(-c[2] + disc) / 2.0, (-c[2] - disc) / 2.0}) {
    roots.push_back(std::sqrt(l2));
    roots.push_back(-std::sqrt(l2));
  }
  std::vector<std::complex<double>> found;
  for (const auto& b : s.blocks) {
    found.push_back(b.eigenvalue());
    if (b.kind == SpectralBlock::Kind::complex_pair) found.push_back(std::conj(b.eigenvalue()));
  }
  REQUIRE(found.size() == 4);
  for (const auto& r : roots) {
    double best = 1e300;
    for (const auto& f : found) best = std::min(best, std::abs(f - r));
    CAPTURE(r);
    CHECK(best < 1e-10 * std::max(1.0, std::abs(r)));
  }
}

TEST_CASE("blocks are sorted and tile the columns") {
  const auto quad = slabsn::gauss_legendre(16);
  const auto t = slabsn::assemble_transport_matrix(testing::core_material(), quad, 1.0 / 1.3);
  const auto s = slabsn::block_diagonalize(t);
  CHECK(rel_residual(t.A, s) <= 1e-10);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) {
    CHECK(s.blocks[i].column == col);
    col += s.blocks[i].size();
    if (s.blocks[i].kind == SpectralBlock::Kind::complex_pair) CHECK(s.blocks[i].im > 0.0);
    if (i > 0) CHECK(s.blocks[i - 1].re <= s.blocks[i].re);
  }
  CHECK(col == s.dimension());
  // Same input, same spectrum.
  const auto again = slabsn::block_diagonalize(t);
  CHECK(again.P == s.P);
}

TEST_CASE("gamma examples") {
  testing::Gen gen(3);
  const auto s = testing::random_spectrum(gen, 6);
  CHECK((slabsn::gamma(s, 0.0) - MatrixXd::Identity(6, 6)).norm() < 1e-15);

  const auto r = slabsn::make_spectrum(MatrixXd::Identity(1, 1), {real_block(2.0)});
  CHECK(slabsn::gamma(r, 0.5)(0, 0) == doctest::Approx(2.718281828459045).epsilon(1e-15));

  const auto c = slabsn::make_spectrum(MatrixXd::Identity(2, 2), {pair_block(0.0, std::numbers::pi)});
  CHECK((slabsn::gamma(c, 1.0) + MatrixXd::Identity(2, 2)).norm() < 1e-15);

  const auto big = slabsn::make_spectrum(MatrixXd::Identity(1, 1), {real_block(-10.0)});
  CHECK_NOTHROW(slabsn::gamma(big, 69.0));
  CHECK_THROWS_AS(slabsn::gamma(big, 71.0), slabsn::Error);
  CHECK_THROWS_AS(slabsn::segment_integral(big, -71.0, 0.0), slabsn::Error);
}

TEST_CASE("gamma is zero outside the block pattern") {
  const auto s = slabsn::make_spectrum(MatrixXd::Identity(5, 5),
                                       {real_block(-1.0, 0), pair_block(0.5, 2.0, 1), real_block(0.3, 3),
                                        real_block(1.0, 4)});
  const MatrixXd G = slabsn::gamma(s, 0.7);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const bool in_block = (i == j) || ((i == 1 || i == 2) && (j == 1 || j == 2));
      if (!in_block) CHECK(G(i, j) == 0.0);
    }
  }
  CHECK(G(1, 1) == doctest::Approx(std::exp(0.35) * std::cos(1.4)));
  CHECK(G(1, 2) == doctest::Approx(std::exp(0.35) * std::sin(1.4)));
  CHECK(G(2, 1) == doctest::Approx(-std::exp(0.35) * std::sin(1.4)));
}

TEST_CASE("segment_integral examples") {
  const auto zero = slabsn::make_spectrum(MatrixXd::Identity(1, 1), {real_block(0.0)});
  CHECK(slabsn::segment_integral(zero, 0.3, 1.7)(0, 0) == doctest::Approx(1.4).epsilon(1e-15));
  const auto one = slabsn::make_spectrum(MatrixXd::Identity(1, 1), {real_block(1.0)});
  CHECK(slabsn::segment_integral(one, 0.0, 1.0)(0, 0) == doctest::Approx(0.6321205588285577).epsilon(1e-15));

  const auto pair = slabsn::make_spectrum(MatrixXd::Identity(2, 2), {pair_block(0.3, 2.0)});
  const MatrixXd I = slabsn::segment_integral(pair, 0.1, 0.7);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double q = testing::adaptive_simpson(
          [&](double xi) { return slabsn::gamma(pair, -xi)(i, j); }, 0.1, 0.7, 1e-13);
      CHECK(std::abs(I(i, j) - q) < 1e-10);
    }
  }
}

TEST_CASE("block integral is smooth across the series switch") {
  for (double lam : {1e-12, 1e-8, 0.2, 0.49, 0.5, 0.51, 3.0, -0.49999, -0.50001}) {
    CAPTURE(lam);
    const double exact = std::expm1(lam) / lam;  // integral of e^{lam u} on [0, 1]
    const auto v = slabsn::block_exp_integral(real_block(lam), 0.0, 1.0);
    CHECK(std::abs(v.real() - exact) < 1e-15 * std::max(1.0, std::abs(exact)) * 4);
    CHECK(v.imag() == 0.0);
  }
  // complex pair near zero modulus
  const auto p = pair_block(1e-9, 2e-9);
  const auto v = slabsn::block_exp_integral(p, -1.0, 2.0);
  CHECK(v.real() == doctest::Approx(3.0 + 1.5e-9).epsilon(1e-12));
}

TEST_CASE("apply_block_diagonal agrees with the dense form") {
  testing::Gen gen(11);
  const auto s = testing::random_spectrum(gen, 9);
  std::vector<std::complex<double>> coeff;
  for (std::size_t i = 0; i < s.blocks.size(); ++i) coeff.emplace_back(gen.uniform(-1, 1), gen.uniform(-1, 1));
  const VectorXd x = gen.vector(9);
  VectorXd out = VectorXd::Zero(9);
  slabsn::apply_block_diagonal(s.blocks, coeff, x, out);
  CHECK((out - slabsn::dense_block_diagonal(s.blocks, coeff, 9) * x).norm() < 1e-14);
}

TEST_CASE("property: group law and inverse on random spectra") {
  testing::Gen gen(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dim = static_cast<Eigen::Index>(gen.integer(1, 64));
    const auto s = testing::random_spectrum(gen, dim, trial % 5 == 0);
    const double x = gen.uniform(-5, 5);
    const double y = gen.uniform(-5, 5);
    const MatrixXd gxy = slabsn::gamma(s, x + y);
    CHECK((slabsn::gamma(s, x) * slabsn::gamma(s, y) - gxy).norm() <= 1e-10 * gxy.norm());
    const MatrixXd prod = slabsn::gamma(s, x) * slabsn::gamma(s, -x);
    CHECK((prod - MatrixXd::Identity(dim, dim)).norm() <= 1e-10 * std::sqrt(double(dim)));
  }
}

TEST_CASE("property: block_diagonalize residual on random well-conditioned matrices") {
  testing::Gen gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dim = static_cast<Eigen::Index>(gen.integer(1, 64));
    const auto ref = testing::random_spectrum(gen, dim);
    const MatrixXd A = ref.P * ref.B() * ref.P_inv;
    const auto s = slabsn::block_diagonalize(A);
    CAPTURE(trial);
    CHECK(rel_residual(A, s) <= 1e-10);
    CHECK(s.dimension() == dim);
  }
}

TEST_CASE("property: finite-difference derivative of P Gamma c is A P Gamma c") {
  testing::Gen gen(5);
  const auto quad = slabsn::gauss_legendre(4);
  const auto t = slabsn::assemble_transport_matrix(testing::core_material(), quad, 1.0 / 1.3);
  const auto s = slabsn::block_diagonalize(t);
  for (int trial = 0; trial < 20; ++trial) {
    const VectorXd c = gen.vector(s.dimension());
    const double x = gen.uniform(-2.0, 2.0);
    auto psi = [&](double xx) -> VectorXd { return s.P * slabsn::gamma(s, xx) * c; };
    const VectorXd exact = t.A * psi(x);
    double err_prev = 0.0;
    for (double h : {2e-2, 1e-2, 5e-3}) {
      const double err = ((psi(x + h) - psi(x - h)) / (2 * h) - exact).norm();
      if (err_prev > 0.0) {
        const double order = std::log2(err_prev / err);
        CHECK(order == doctest::Approx(2.0).epsilon(0.05));
      }
      err_prev = err;
    }
  }
}

TEST_CASE("property: segment_integral matches adaptive quadrature") {
  testing::Gen gen(77);
  for (int trial = 0; trial < 30; ++trial) {
    const auto dim = static_cast<Eigen::Index>(gen.integer(1, 6));
    const auto s = testing::random_spectrum(gen, dim, trial % 3 == 0);
    const double a = gen.uniform(-2.0, 2.0);
    const double b = a + gen.uniform(0.0, 2.0);
    const MatrixXd I = slabsn::segment_integral(s, a, b);
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        const double q = testing::adaptive_simpson([&](double xi) { return slabsn::gamma(s, -xi)(i, j); }, a, b,
                                                   1e-12);
        CHECK(std::abs(I(i, j) - q) <= 1e-9);
      }
    }
  }
}
