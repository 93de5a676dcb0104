#include "hetune/hecore/serialize.hpp"

#include <bit>
#include <cstring>

#include <sodium.h>

#include "hetune/errors.hpp"

namespace hetune::he {

namespace {

using encoding::BigInt;

constexpr std::uint32_t kKeyMagic = 0x4b54484e;  // "NHTK"

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void limbs(const std::vector<std::uint64_t>& v) {
    u64(v.size());
    for (auto x : v) u64(x);
  }
  void poly(const RnsPoly& p) {
    std::uint64_t count = 0;
    for (const auto& r : p.residues) count += r.size();
    u64(count);
    for (const auto& r : p.residues)
      for (auto x : r) u64(x);
  }
  void raw(std::span<const std::uint8_t> data) {
    out_.insert(out_.end(), data.begin(), data.end());
  }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t{data_[pos_ + i]} << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{data_[pos_ + i]} << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::vector<std::uint64_t> limbs(std::uint64_t max_count) {
    const std::uint64_t count = u64();
    if (count > max_count) throw FormatError("limb count out of range");
    need(count * 8);
    std::vector<std::uint64_t> v(count);
    for (auto& x : v) x = u64();
    return v;
  }
  RnsPoly poly(std::size_t primes, std::size_t n,
               const std::vector<std::uint64_t>& moduli) {
    const std::uint64_t count = u64();
    if (count != primes * n) throw FormatError("polynomial has wrong size");
    need(count * 8);
    RnsPoly p;
    p.residues.assign(primes, std::vector<std::uint64_t>(n));
    for (std::size_t j = 0; j < primes; ++j) {
      for (auto& c : p.residues[j]) {
        c = u64();
        if (c >= moduli[j]) throw FormatError("coefficient not reduced");
      }
    }
    return p;
  }
  std::span<const std::uint8_t> rest() const { return data_.subspan(pos_); }
  void skip(std::size_t k) {
    need(k);
    pos_ += k;
  }
  void expect_end() const {
    if (pos_ != data_.size()) throw FormatError("trailing bytes");
  }

 private:
  void need(std::uint64_t k) const {
    if (k > data_.size() - pos_) throw FormatError("truncated data");
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

std::vector<std::uint64_t> to_limbs(const BigInt& v) {
  std::vector<std::uint64_t> limbs;
  if (v != 0) export_bits(v, std::back_inserter(limbs), 64, false);
  return limbs;
}

BigInt from_limbs(const std::vector<std::uint64_t>& limbs) {
  BigInt v = 0;
  if (!limbs.empty()) import_bits(v, limbs.begin(), limbs.end(), 64, false);
  return v;
}

std::vector<std::uint64_t> chain_moduli(const HeContext& ctx) {
  return ctx.params().modulus_chain;
}

BackendKind read_backend(std::uint32_t tag) {
  if (tag == static_cast<std::uint32_t>(BackendKind::reference))
    return BackendKind::reference;
  if (tag == static_cast<std::uint32_t>(BackendKind::rlwe)) return BackendKind::rlwe;
  throw FormatError("unknown backend tag " + std::to_string(tag));
}

}  // namespace

Bytes serialize(const Ciphertext& ct) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(ct.backend()));
  w.u32(static_cast<std::uint32_t>(ct.level()));
  w.u32(static_cast<std::uint32_t>(ct.scale_power()));
  if (ct.backend() == BackendKind::reference) {
    w.u32(1);
    w.f64(ct.scale());
    w.limbs(to_limbs(std::get<ReferencePayload>(ct.payload())));
  } else {
    const auto& p = std::get<RlwePayload>(ct.payload());
    w.u32(static_cast<std::uint32_t>(p.c0.residues.front().size()));
    w.f64(ct.scale());
    w.poly(p.c0);
    w.poly(p.c1);
  }
  return w.take();
}

Ciphertext deserialize_ciphertext(std::span<const std::uint8_t> data,
                                  const HeContext& ctx) {
  Reader r(data);
  const BackendKind backend = read_backend(r.u32());
  const std::uint32_t level = r.u32();
  const std::uint32_t scale_power = r.u32();
  const std::uint32_t n = r.u32();
  const double scale = r.f64();
  if (backend != ctx.backend()) throw FormatError("ciphertext backend mismatch");
  if (level > static_cast<std::uint32_t>(ctx.top_level()))
    throw FormatError("ciphertext level out of range");
  if (scale_power < 1) throw FormatError("scale_power must be positive");
  if (!(scale > 0.0)) throw FormatError("scale must be positive");
  const int lvl = static_cast<int>(level);
  if (backend == BackendKind::reference) {
    if (n != 1) throw FormatError("reference ciphertext ring dimension must be 1");
    const BigInt& q = ctx.modulus_at(lvl);
    BigInt value = from_limbs(r.limbs(64));
    if (value >= q) throw FormatError("reference payload not reduced");
    r.expect_end();
    return Ciphertext(backend, lvl, static_cast<int>(scale_power), scale,
                      std::move(value));
  }
  if (n != ctx.ring_dimension()) throw FormatError("ring dimension mismatch");
  const auto moduli = chain_moduli(ctx);
  RlwePayload p;
  p.c0 = r.poly(level + 1, n, moduli);
  p.c1 = r.poly(level + 1, n, moduli);
  r.expect_end();
  return Ciphertext(backend, lvl, static_cast<int>(scale_power), scale,
                    std::move(p));
}

Bytes serialize(const EvaluationKey& key) {
  Writer w;
  w.u32(static_cast<std::uint32_t>(key.backend));
  w.u32(static_cast<std::uint32_t>(key.relin.size()));
  for (const auto& [b, a] : key.relin) {
    w.poly(b);
    w.poly(a);
  }
  return w.take();
}

EvaluationKey deserialize_evaluation_key(std::span<const std::uint8_t> data,
                                         const HeContext& ctx) {
  Reader r(data);
  EvaluationKey key;
  key.backend = read_backend(r.u32());
  if (key.backend != ctx.backend()) throw FormatError("evaluation key backend mismatch");
  const std::uint32_t count = r.u32();
  const std::uint32_t expected =
      key.backend == BackendKind::rlwe ? static_cast<std::uint32_t>(ctx.total_digits()) : 0;
  if (count != expected) throw FormatError("evaluation key has wrong entry count");
  const auto moduli = chain_moduli(ctx);
  const std::size_t primes = moduli.size();
  for (std::uint32_t i = 0; i < count; ++i) {
    RnsPoly b = r.poly(primes, ctx.ring_dimension(), moduli);
    RnsPoly a = r.poly(primes, ctx.ring_dimension(), moduli);
    key.relin.push_back({std::move(b), std::move(a)});
  }
  r.expect_end();
  return key;
}

Bytes serialize(const SecretKeyMaterial& keys) {
  Writer w;
  w.u32(kKeyMagic);
  w.u32(static_cast<std::uint32_t>(keys.backend()));
  w.u64(keys.secret().size());
  for (auto c : keys.secret()) w.raw(std::span(reinterpret_cast<const std::uint8_t*>(&c), 1));
  w.raw(serialize(*keys.evaluation_key()));
  return w.take();
}

SecretKeyMaterial deserialize_secret_key(std::span<const std::uint8_t> data,
                                         const HeContext& ctx) {
  Reader r(data);
  if (r.u32() != kKeyMagic) throw FormatError("not a secret key file");
  const BackendKind backend = read_backend(r.u32());
  if (backend != ctx.backend()) throw FormatError("secret key backend mismatch");
  const std::uint64_t n = r.u64();
  const std::uint64_t expected = backend == BackendKind::rlwe ? ctx.ring_dimension() : 0;
  if (n != expected) throw FormatError("secret key has wrong dimension");
  std::vector<std::int8_t> s(n);
  const auto coeffs = r.rest().first(std::min<std::size_t>(n, r.rest().size()));
  if (coeffs.size() != n) throw FormatError("truncated secret key");
  for (std::size_t k = 0; k < n; ++k) {
    s[k] = static_cast<std::int8_t>(coeffs[k]);
    if (s[k] < -1 || s[k] > 1) throw FormatError("secret key is not ternary");
  }
  r.skip(n);
  auto evaluation =
      std::make_shared<EvaluationKey>(deserialize_evaluation_key(r.rest(), ctx));
  RnsPoly s_ntt;
  if (backend == BackendKind::rlwe) s_ntt = secret_to_ntt(ctx, s);
  return SecretKeyMaterial(backend, std::move(s), std::move(s_ntt),
                           std::move(evaluation));
}

std::string base64_encode(std::span<const std::uint8_t> data) {
  constexpr int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_ENCODED_LEN(data.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), data.data(), data.size(), variant);
  out.resize(out.size() - 1);  // drop the terminator
  return out;
}

Bytes base64_decode(std::string_view text) {
  Bytes out(text.size() / 4 * 3 + 3);
  std::size_t length = 0;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(),
                        nullptr, &length, nullptr,
                        sodium_base64_VARIANT_ORIGINAL) != 0) {
    throw FormatError("invalid base64");
  }
  out.resize(length);
  return out;
}

nlohmann::json params_to_json(const HeParams& p) {
  return {
      {"backend", std::string(to_string(p.backend))},
      {"ring_dimension", p.ring_dimension},
      {"modulus_chain", p.modulus_chain},
      {"scale_c", p.scale_c},
      {"error_std", p.error_std},
  };
}

HeParams params_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("preset")) {
      HeParams p = HeParams::preset(j.at("preset").get<std::string>());
      if (j.contains("backend")) p.backend = parse_backend(j.at("backend").get<std::string>());
      return p;
    }
    HeParams p;
    p.backend = parse_backend(j.at("backend").get<std::string>());
    p.ring_dimension = j.at("ring_dimension").get<std::size_t>();
    p.modulus_chain = j.at("modulus_chain").get<std::vector<std::uint64_t>>();
    p.scale_c = j.value("scale_c", p.scale_c);
    p.error_std = j.value("error_std", p.error_std);
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("HE parameters: ") + e.what());
  }
}

}  // namespace hetune::he
