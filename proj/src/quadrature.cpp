#include "slabsn/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "slabsn/error.hpp"

namespace slabsn {

void QuadratureSet::validate() const {
  const std::size_t n = mu.size();
  if (n == 0 || n % 2 != 0) {
    throw Error(ErrorKind::Validation, "quadrature: ordinate count must be even and positive");
  }
  if (weight.size() != n) {
    throw Error(ErrorKind::Validation, "quadrature: mu and weight sizes differ");
  }
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mu[i] > -1.0 && mu[i] < 1.0) || mu[i] == 0.0) {
      throw Error(ErrorKind::Validation,
                  "quadrature: ordinate " + std::to_string(i) + " outside (-1,0)U(0,1)");
    }
    if (!(weight[i] > 0.0)) {
      throw Error(ErrorKind::Validation, "quadrature: weights must be positive");
    }
    if (i > 0 && !(mu[i] > mu[i - 1])) {
      throw Error(ErrorKind::Validation, "quadrature: ordinates must be strictly ascending");
    }
    if (std::abs(mu[i] + mu[mirror(i)]) > 1e-14) {
      throw Error(ErrorKind::Validation, "quadrature: ordinates must be symmetric about zero");
    }
    wsum += weight[i];
  }
  if (std::abs(wsum - 2.0) > 1e-12) {
    throw Error(ErrorKind::Validation, "quadrature: weights must sum to 2");
  }
}

QuadratureSet gauss_legendre(int order) {
  if (order < 2 || order > 64 || order % 2 != 0) {
    throw Error(ErrorKind::InvalidArgument,
                "gauss_legendre: order must be even in [2, 64], got " + std::to_string(order));
  }
  const int n = order;
  QuadratureSet q;
  q.mu.resize(n);
  q.weight.resize(n);

  // Newton on P_n for the positive roots, starting from the Chebyshev-like
  // estimate; the negative roots follow by symmetry.
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Refresh the derivative at the converged root.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // i = 0 is the largest root.
    q.mu[n - 1 - i] = x;
    q.mu[i] = -x;
    q.weight[n - 1 - i] = w;
    q.weight[i] = w;
  }
  return q;
}

}  // namespace slabsn
