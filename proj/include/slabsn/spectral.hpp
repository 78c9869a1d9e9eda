#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "slabsn/material.hpp"
#include "slabsn/quadrature.hpp"

namespace slabsn {

/// Streaming-collision matrix of one material: d/dx Psi = A Psi + Q/mu.
/// Row and column index (g, n) map to g * N + n (0-based, group-major).
struct TransportMatrix {
  Eigen::MatrixXd A;
  std::size_t groups = 0;
  std::size_t ordinates = 0;
  /// 0 for a pure fixed-source operator, 1/k_e when fission is folded in.
  double fission_scale = 0.0;
};

/// Builds A from cross sections. Isotropic scattering and fission contribute
/// Sigma/2 per unit weight; a material's explicit kernel replaces the
/// isotropic scattering part.
TransportMatrix assemble_transport_matrix(const MaterialXS& material, const QuadratureSet& quad,
                                          double fission_scale);

/// One diagonal block of B. A real eigenvalue occupies one column; a complex
/// pair re +/- i*im (im > 0) occupies two adjacent columns with block
/// [[re, im], [-im, re]] and P columns [Re v | Im v].
struct SpectralBlock {
  enum class Kind { real, complex_pair };
  Kind kind = Kind::real;
  double re = 0.0;
  double im = 0.0;
  Eigen::Index column = 0;

  Eigen::Index size() const { return kind == Kind::real ? 1 : 2; }
  std::complex<double> eigenvalue() const { return {re, im}; }
};

/// A P = P B with B block diagonal (1x1 and 2x2 blocks).
struct BlockSpectrum {
  Eigen::MatrixXd P;
  Eigen::MatrixXd P_inv;
  std::vector<SpectralBlock> blocks;

  Eigen::Index dimension() const { return P.rows(); }
  /// Dense B assembled from the blocks.
  Eigen::MatrixXd B() const;
};

/// Real block diagonalization. Blocks are sorted by real part, then |imag|.
/// Throws DefectiveOrIllConditioned when P is numerically singular
/// (reciprocal condition < 1e-13) or the residual |AP - PB|_F exceeds
/// 1e-10 |A|_F.
BlockSpectrum block_diagonalize(const Eigen::MatrixXd& A);
inline BlockSpectrum block_diagonalize(const TransportMatrix& t) { return block_diagonalize(t.A); }

/// Builds a spectrum from explicit blocks and a basis (mainly for testing).
BlockSpectrum make_spectrum(Eigen::MatrixXd P, std::vector<SpectralBlock> blocks);

/// Scalar form of one block: a real block is e^{lambda u}; a 2x2 block
/// [[c, s], [-s, c]] is represented by the complex number c + i s.
std::complex<double> block_exp(const SpectralBlock& block, double u);

/// Integral of one block of Gamma(u) over [u_a, u_b], same representation.
/// Uses a series for small |lambda|*(u_b - u_a), so zero eigenvalues are fine.
std::complex<double> block_exp_integral(const SpectralBlock& block, double u_a, double u_b);

/// out += D x, where D has the block pattern of `blocks` and one complex
/// coefficient per block (see block_exp for the representation).
void apply_block_diagonal(const std::vector<SpectralBlock>& blocks,
                          std::span<const std::complex<double>> coeff,
                          const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> out);

Eigen::MatrixXd dense_block_diagonal(const std::vector<SpectralBlock>& blocks,
                                     std::span<const std::complex<double>> coeff, Eigen::Index dim);

/// Gamma(x) = exp(B x). Throws Overflow when any |Re(lambda) x| exceeds 700.
Eigen::MatrixXd gamma(const BlockSpectrum& spectrum, double x);

/// Integral of Gamma(-xi) over [x_a, x_b], evaluated block by block in closed form.
Eigen::MatrixXd segment_integral(const BlockSpectrum& spectrum, double x_a, double x_b);

inline constexpr double kExponentLimit = 700.0;

}  // namespace slabsn
