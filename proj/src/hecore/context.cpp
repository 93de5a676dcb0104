#include "hetune/hecore/context.hpp"

#include <bit>

namespace hetune::he {

std::shared_ptr<const HeContext> HeContext::create(const HeParams& params) {
  params.validate();
  return std::shared_ptr<const HeContext>(new HeContext(params));
}

HeContext::HeContext(const HeParams& params) : params_(params) {
  const int count = static_cast<int>(params_.modulus_chain.size());

  encoding::BigInt q = 1;
  for (int j = 0; j < count; ++j) {
    q *= params_.modulus_chain[j];
    moduli_.push_back(q);
  }

  inverse_primes_.resize(count);
  for (int top = 1; top < count; ++top) {
    for (int j = 0; j < top; ++j) {
      inverse_primes_[top].push_back(
          inv_mod(params_.modulus_chain[top] % params_.modulus_chain[j],
                  params_.modulus_chain[j]));
    }
  }

  int offset = 0;
  for (int j = 0; j < count; ++j) {
    const int bits = std::bit_width(params_.modulus_chain[j]);
    const int digits = (bits + kDigitBits - 1) / kDigitBits;
    digit_counts_.push_back(digits);
    digit_offsets_.push_back(offset);
    offset += digits;
  }
  digit_offsets_.push_back(offset);

  if (params_.backend == BackendKind::rlwe) {
    ntt_.reserve(count);
    for (int j = 0; j < count; ++j) {
      ntt_.emplace_back(params_.modulus_chain[j], params_.ring_dimension);
    }
  }
}

}  // namespace hetune::he
