#include "hetune/hecore/params.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hetune/errors.hpp"
#include "hetune/hecore/modarith.hpp"

namespace hetune::he {

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::reference:
      return "reference";
    case BackendKind::rlwe:
      return "rlwe";
  }
  return "unknown";
}

BackendKind parse_backend(std::string_view name) {
  if (name == "reference") return BackendKind::reference;
  if (name == "rlwe") return BackendKind::rlwe;
  throw ConfigError("unknown HE backend '" + std::string(name) + "'");
}

encoding::BigInt HeParams::chain_product() const {
  encoding::BigInt q = 1;
  for (auto p : modulus_chain) q *= p;
  return q;
}

void HeParams::validate() const {
  if (backend != BackendKind::reference && backend != BackendKind::rlwe) {
    throw ConfigError("HeParams: invalid backend tag");
  }
  if (ring_dimension < 1024 || (ring_dimension & (ring_dimension - 1)) != 0) {
    throw ConfigError("HeParams: ring_dimension must be a power of two >= 1024");
  }
  if (modulus_chain.size() < 2) {
    throw ConfigError("HeParams: modulus chain needs a base prime and at "
                      "least one scale prime");
  }
  if (!(scale_c >= 1.0) || !std::isfinite(scale_c)) {
    throw ConfigError("HeParams: scale_c must be >= 1");
  }
  if (!(error_std > 0.0)) {
    throw ConfigError("HeParams: error_std must be positive");
  }
  std::set<std::uint64_t> distinct(modulus_chain.begin(), modulus_chain.end());
  if (distinct.size() != modulus_chain.size()) {
    throw ConfigError("HeParams: chain primes must be pairwise distinct");
  }
  const std::uint64_t two_n = 2 * static_cast<std::uint64_t>(ring_dimension);
  for (auto q : modulus_chain) {
    if (q >= (std::uint64_t{1} << 61) || !is_prime(q)) {
      throw ConfigError("HeParams: chain entries must be primes below 2^61");
    }
    if (backend == BackendKind::rlwe && q % two_n != 1) {
      throw ConfigError("HeParams: chain primes must be 1 mod 2n");
    }
  }
}

HeParams HeParams::with_levels(BackendKind backend, std::size_t n, int levels,
                               int scale_bits, int base_bits) {
  if (levels < 1) throw ConfigError("HeParams: levels must be >= 1");
  HeParams p;
  p.backend = backend;
  p.ring_dimension = n;
  p.scale_c = std::ldexp(1.0, scale_bits);
  const auto base = ntt_primes_below(base_bits, 1, n);
  const auto scale_primes =
      ntt_primes_below(scale_bits, static_cast<std::size_t>(levels), n, base);
  p.modulus_chain = base;
  p.modulus_chain.insert(p.modulus_chain.end(), scale_primes.begin(),
                         scale_primes.end());
  p.validate();
  return p;
}

HeParams HeParams::paper(BackendKind backend) {
  return with_levels(backend, 2048, 4);
}

HeParams HeParams::test(BackendKind backend) {
  return with_levels(backend, 1024, 4);
}

HeParams HeParams::preset(std::string_view name) {
  if (name == "paper") return paper(BackendKind::rlwe);
  if (name == "test") return test(BackendKind::rlwe);
  if (name == "paper-reference") return paper(BackendKind::reference);
  if (name == "test-reference") return test(BackendKind::reference);
  throw ConfigError("unknown HE preset '" + std::string(name) + "'");
}

}  // namespace hetune::he
