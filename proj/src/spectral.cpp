#include "slabsn/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "slabsn/error.hpp"

namespace slabsn {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

TransportMatrix assemble_transport_matrix(const MaterialXS& material, const QuadratureSet& quad,
                                          double fission_scale) {
  const Index G = static_cast<Index>(material.groups());
  const Index N = static_cast<Index>(quad.size());
  const Index NG = G * N;
  if (material.scattering_kernel && material.scattering_kernel->rows() != NG) {
    throw Error(ErrorKind::InvalidArgument, "scattering kernel does not match G*N");
  }
  TransportMatrix t;
  t.groups = static_cast<std::size_t>(G);
  t.ordinates = static_cast<std::size_t>(N);
  t.fission_scale = fission_scale;
  t.A = MatrixXd::Zero(NG, NG);
  for (Index g = 0; g < G; ++g) {
    for (Index n = 0; n < N; ++n) {
      const Index r = g * N + n;
      const double inv_mu = 1.0 / quad.mu[static_cast<std::size_t>(n)];
      for (Index gp = 0; gp < G; ++gp) {
        const double iso = 0.5 * material.sigma_s[static_cast<std::size_t>(gp)][static_cast<std::size_t>(g)];
        const double fis = 0.5 * fission_scale * material.chi[static_cast<std::size_t>(g)] *
                           material.nu_sigma_f[static_cast<std::size_t>(gp)];
        for (Index np = 0; np < N; ++np) {
          const Index c = gp * N + np;
          const double scat = material.scattering_kernel ? (*material.scattering_kernel)(r, c) : iso;
          t.A(r, c) = inv_mu * quad.weight[static_cast<std::size_t>(np)] * (scat + fis);
        }
      }
      t.A(r, r) -= inv_mu * material.sigma_t[static_cast<std::size_t>(g)];
    }
  }
  return t;
}

MatrixXd BlockSpectrum::B() const {
  MatrixXd b = MatrixXd::Zero(dimension(), dimension());
  for (const auto& blk : blocks) {
    const Index c = blk.column;
    b(c, c) = blk.re;
    if (blk.kind == SpectralBlock::Kind::complex_pair) {
      b(c, c + 1) = blk.im;
      b(c + 1, c) = -blk.im;
      b(c + 1, c + 1) = blk.re;
    }
  }
  return b;
}

namespace {

// Sign convention so that the same A always yields the same P.
void fix_sign(Eigen::Ref<VectorXd> v) {
  Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v(imax) < 0.0) v = -v;
}

void finish_spectrum(BlockSpectrum& s) {
  Eigen::PartialPivLU<MatrixXd> lu(s.P);
  const double rcond = lu.rcond();
  if (!(rcond > 1e-13) || !std::isfinite(rcond)) {
    throw Error(ErrorKind::DefectiveOrIllConditioned,
                "eigenvector matrix is numerically singular (rcond = " + std::to_string(rcond) +
                    "); the transport matrix is defective or nearly so");
  }
  s.P_inv = lu.inverse();
}

}  // namespace

BlockSpectrum block_diagonalize(const MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw Error(ErrorKind::InvalidArgument, "block_diagonalize: matrix must be square and nonempty");
  }
  if (!A.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "block_diagonalize: matrix has non-finite entries");
  }
  const Index n = A.rows();
  Eigen::EigenSolver<MatrixXd> es(A, true);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::DefectiveOrIllConditioned, "eigensolver did not converge");
  }
  const auto& values = es.eigenvalues();
  const auto& vectors = es.eigenvectors();

  struct Entry {
    cplx lambda;
    Index source;
  };
  std::vector<Entry> entries;
  for (Index i = 0; i < n; ++i) {
    if (values(i).imag() >= 0.0) entries.push_back({values(i), i});
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return std::abs(a.lambda.imag()) < std::abs(b.lambda.imag());
  });

  BlockSpectrum s;
  s.P.resize(n, n);
  Index col = 0;
  for (const auto& e : entries) {
    const Eigen::VectorXcd v = vectors.col(e.source);
    if (e.lambda.imag() == 0.0) {
      VectorXd re = v.real();
      re.normalize();
      fix_sign(re);
      s.P.col(col) = re;
      s.blocks.push_back({SpectralBlock::Kind::real, e.lambda.real(), 0.0, col});
      col += 1;
    } else {
      if (col + 2 > n) break;
      // Rotate the phase so Re v and Im v are orthogonal, Re v the longer one.
      VectorXd u = v.real();
      VectorXd w = v.imag();
      const double theta = 0.5 * std::atan2(2.0 * u.dot(w), u.squaredNorm() - w.squaredNorm());
      const double c = std::cos(theta);
      const double sn = std::sin(theta);
      // (u + i w) * e^{-i theta}
      VectorXd ur = c * u + sn * w;
      VectorXd wr = c * w - sn * u;
      Index imax = 0;
      ur.cwiseAbs().maxCoeff(&imax);
      if (ur(imax) < 0.0) {
        ur = -ur;
        wr = -wr;
      }
      const double scale = std::sqrt(ur.squaredNorm() + wr.squaredNorm());
      s.P.col(col) = ur / scale;
      s.P.col(col + 1) = wr / scale;
      s.blocks.push_back({SpectralBlock::Kind::complex_pair, e.lambda.real(), e.lambda.imag(), col});
      col += 2;
    }
  }
  if (col != n) {
    throw Error(ErrorKind::DefectiveOrIllConditioned, "eigenvalue pairing did not tile the matrix");
  }
  finish_spectrum(s);

  const double norm_a = A.norm();
  const double residual = (A * s.P - s.P * s.B()).norm();
  if (!(residual <= 1e-10 * std::max(norm_a, 1e-300))) {
    throw Error(ErrorKind::DefectiveOrIllConditioned,
                "block diagonalization residual " + std::to_string(residual / norm_a) +
                    " exceeds 1e-10 relative");
  }
  return s;
}

BlockSpectrum make_spectrum(MatrixXd P, std::vector<SpectralBlock> blocks) {
  BlockSpectrum s;
  s.P = std::move(P);
  s.blocks = std::move(blocks);
  Index col = 0;
  for (auto& b : s.blocks) {
    b.column = col;
    if (b.kind == SpectralBlock::Kind::complex_pair && !(b.im > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "complex pair blocks need im > 0");
    }
    col += b.size();
  }
  if (col != s.P.rows() || s.P.rows() != s.P.cols()) {
    throw Error(ErrorKind::InvalidArgument, "blocks do not tile the basis");
  }
  finish_spectrum(s);
  return s;
}

cplx block_exp(const SpectralBlock& block, double u) {
  const double mag = std::exp(block.re * u);
  if (block.kind == SpectralBlock::Kind::real) return {mag, 0.0};
  return {mag * std::cos(block.im * u), mag * std::sin(block.im * u)};
}

namespace {

// (e^w - 1) / w, accurate for all w including 0.
cplx phi1(cplx w) {
  if (std::abs(w) < 0.5) {
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 2; k < 30; ++k) {
      term *= w / static_cast<double>(k);
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
  }
  const double a = w.real();
  const double b = w.imag();
  const double sh = std::sin(0.5 * b);
  const cplx em1{std::expm1(a) * std::cos(b) - 2.0 * sh * sh, std::exp(a) * std::sin(b)};
  return em1 / w;
}

}  // namespace

cplx block_exp_integral(const SpectralBlock& block, double u_a, double u_b) {
  // e^{z u_a} * integral_0^{delta} e^{z t} dt = e^{z u_a} * delta * phi1(z delta)
  const double delta = u_b - u_a;
  const cplx z = block.kind == SpectralBlock::Kind::real ? cplx{block.re, 0.0} : block.eigenvalue();
  const cplx start = block_exp(block, u_a);
  return start * delta * phi1(z * delta);
}

void apply_block_diagonal(const std::vector<SpectralBlock>& blocks, std::span<const cplx> coeff,
                          const Eigen::Ref<const VectorXd>& x, Eigen::Ref<VectorXd> out) {
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Index c = blocks[k].column;
    const cplx w = coeff[k];
    if (blocks[k].kind == SpectralBlock::Kind::real) {
      out(c) += w.real() * x(c);
    } else {
      // [[Re w, Im w], [-Im w, Re w]]
      out(c) += w.real() * x(c) + w.imag() * x(c + 1);
      out(c + 1) += -w.imag() * x(c) + w.real() * x(c + 1);
    }
  }
}

MatrixXd dense_block_diagonal(const std::vector<SpectralBlock>& blocks, std::span<const cplx> coeff,
                              Index dim) {
  MatrixXd d = MatrixXd::Zero(dim, dim);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Index c = blocks[k].column;
    const cplx w = coeff[k];
    d(c, c) = w.real();
    if (blocks[k].kind == SpectralBlock::Kind::complex_pair) {
      d(c, c + 1) = w.imag();
      d(c + 1, c) = -w.imag();
      d(c + 1, c + 1) = w.real();
    }
  }
  return d;
}

namespace {

void guard_exponent(const BlockSpectrum& s, double x, const char* what) {
  for (const auto& b : s.blocks) {
    if (std::abs(b.re * x) > kExponentLimit) {
      throw Error(ErrorKind::Overflow, std::string(what) + ": exponent |Re(lambda) x| = " +
                                           std::to_string(std::abs(b.re * x)) +
                                           " exceeds 700; split the region");
    }
  }
}

}  // namespace

MatrixXd gamma(const BlockSpectrum& s, double x) {
  guard_exponent(s, x, "gamma");
  std::vector<cplx> coeff;
  coeff.reserve(s.blocks.size());
  for (const auto& b : s.blocks) coeff.push_back(block_exp(b, x));
  return dense_block_diagonal(s.blocks, coeff, s.dimension());
}

MatrixXd segment_integral(const BlockSpectrum& s, double x_a, double x_b) {
  if (x_a > x_b) throw Error(ErrorKind::InvalidArgument, "segment_integral: need x_a <= x_b");
  guard_exponent(s, x_a, "segment_integral");
  guard_exponent(s, x_b, "segment_integral");
  std::vector<cplx> coeff;
  coeff.reserve(s.blocks.size());
  // integral_{x_a}^{x_b} Gamma(-xi) dxi = integral_{-x_b}^{-x_a} Gamma(u) du
  for (const auto& b : s.blocks) coeff.push_back(block_exp_integral(b, -x_b, -x_a));
  return dense_block_diagonal(s.blocks, coeff, s.dimension());
}

}  // namespace slabsn
