#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hetune/hecore/modarith.hpp"

namespace hetune::he {

/// Negacyclic number-theoretic transform over Z_q[X]/(X^n + 1).
///
/// forward() maps coefficients to evaluations at the odd powers of a
/// primitive 2n-th root (bit-reversed order); inverse() undoes it. Pointwise
/// products in the transformed domain are negacyclic convolutions.
class NttTables {
 public:
  NttTables(u64 modulus, std::size_t n);

  u64 modulus() const { return q_; }
  std::size_t size() const { return n_; }

  void forward(std::span<u64> a) const;
  void inverse(std::span<u64> a) const;

 private:
  u64 q_;
  std::size_t n_;
  std::vector<u64> roots_;         // psi^bitrev(i)
  std::vector<u64> roots_shoup_;
  std::vector<u64> inv_roots_;     // psi^-bitrev(i)
  std::vector<u64> inv_roots_shoup_;
  u64 n_inv_;
  u64 n_inv_shoup_;
};

/// Schoolbook negacyclic product, O(n^2). Reference path for tests and for
/// rings too small to transform.
std::vector<u64> negacyclic_multiply_schoolbook(std::span<const u64> a,
                                                std::span<const u64> b, u64 q);

}  // namespace hetune::he
