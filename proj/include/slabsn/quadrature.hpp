#pragma once

#include <cstddef>
#include <vector>

namespace slabsn {

/// Discrete ordinates on [-1, 1] in ascending order. The first half holds the
/// negative directions, the second half their mirror images.
struct QuadratureSet {
  std::vector<double> mu;
  std::vector<double> weight;

  std::size_t size() const { return mu.size(); }

  /// Index of the ordinate with direction -mu[n].
  std::size_t mirror(std::size_t n) const { return mu.size() - 1 - n; }

  /// Throws Validation if any invariant (even size, symmetric, sorted,
  /// nonzero, weights summing to 2) is broken.
  void validate() const;
};

/// Gauss-Legendre set of even order 2 <= order <= 64.
QuadratureSet gauss_legendre(int order);

}  // namespace slabsn
