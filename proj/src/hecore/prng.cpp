#include "hetune/hecore/prng.hpp"

#include <sodium.h>

#include <cstring>
#include <stdexcept>

namespace hetune::he {

namespace {

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw std::runtime_error("libsodium initialization failed");
}

}  // namespace

ChaChaRng::ChaChaRng(const Seed& seed) : key_(seed) { ensure_sodium(); }

ChaChaRng::ChaChaRng(std::uint64_t seed) {
  ensure_sodium();
  unsigned char input[8];
  for (int i = 0; i < 8; ++i) input[i] = static_cast<unsigned char>(seed >> (8 * i));
  crypto_generichash(key_.data(), key_.size(), input, sizeof input, nullptr, 0);
}

ChaChaRng ChaChaRng::from_os() {
  ensure_sodium();
  Seed seed;
  randombytes_buf(seed.data(), seed.size());
  return ChaChaRng(seed);
}

void ChaChaRng::refill() {
  unsigned char nonce[crypto_stream_chacha20_ietf_NONCEBYTES] = {};
  std::memcpy(nonce, &block_counter_, sizeof block_counter_);
  ++block_counter_;
  unsigned char bytes[sizeof buffer_];
  crypto_stream_chacha20_ietf(bytes, sizeof bytes, nonce, key_.data());
  std::memcpy(buffer_.data(), bytes, sizeof bytes);
  position_ = 0;
}

ChaChaRng::result_type ChaChaRng::operator()() {
  if (position_ == buffer_.size()) refill();
  return buffer_[position_++];
}

}  // namespace hetune::he
