#include "hetune/hecore/evaluator.hpp"

#include <cmath>
#include <string>

#include "backend_impl.hpp"
#include "hetune/errors.hpp"

namespace hetune::he {

namespace {

constexpr double kScaleTolerance = 1e-9;

bool same_scale(double a, double b) {
  return std::abs(a - b) <= kScaleTolerance * std::max(std::abs(a), std::abs(b));
}

void check_keys(const HeContext& ctx, const SecretKeyMaterial& keys) {
  if (keys.backend() != ctx.backend()) {
    throw BackendMismatch("key material belongs to a different backend");
  }
  if (ctx.backend() == BackendKind::rlwe &&
      keys.ring_dimension() != ctx.ring_dimension()) {
    throw BackendMismatch("key ring dimension does not match context");
  }
}

}  // namespace

Encryptor::Encryptor(std::shared_ptr<const HeContext> ctx,
                     std::shared_ptr<const SecretKeyMaterial> keys,
                     ChaChaRng rng)
    : ctx_(std::move(ctx)), keys_(std::move(keys)), rng_(std::move(rng)) {
  check_keys(*ctx_, *keys_);
}

Ciphertext Encryptor::encrypt(double x) {
  return encrypt(x, ctx_->top_level(), ctx_->params().scale_c);
}

Ciphertext Encryptor::encrypt(double x, int level, double scale) {
  if (level < 0 || level > ctx_->top_level()) {
    throw ConfigError("encrypt: level out of range");
  }
  if (!(scale > 0.0)) throw ConfigError("encrypt: scale must be positive");
  const encoding::BigInt message = encoding::round_scaled(x, scale);
  const encoding::BigInt magnitude = message < 0 ? encoding::BigInt(-message) : message;
  if (2 * magnitude >= ctx_->modulus_at(level)) {
    throw RangeError("encrypt: |scale * x| exceeds half the ciphertext modulus");
  }
  if (ctx_->backend() == BackendKind::reference) {
    return Ciphertext(BackendKind::reference, level, 1, scale,
                      detail::reference::encrypt(*ctx_, message, level));
  }
  return Ciphertext(BackendKind::rlwe, level, 1, scale,
                    detail::rlwe::encrypt(*ctx_, *keys_, message, level, rng_));
}

Decryptor::Decryptor(std::shared_ptr<const HeContext> ctx,
                     std::shared_ptr<const SecretKeyMaterial> keys)
    : ctx_(std::move(ctx)), keys_(std::move(keys)) {
  check_keys(*ctx_, *keys_);
}

double Decryptor::decrypt(const Ciphertext& ct) const {
  if (ct.backend() != ctx_->backend()) {
    throw BackendMismatch("decrypt: ciphertext from a different backend");
  }
  if (ct.level() < 0 || ct.level() > ctx_->top_level()) {
    throw BackendMismatch("decrypt: ciphertext level outside this context");
  }
  encoding::BigInt residue;
  if (ctx_->backend() == BackendKind::reference) {
    residue = detail::reference::decrypt(
        *ctx_, std::get<ReferencePayload>(ct.payload()), ct.level());
  } else {
    residue = detail::rlwe::decrypt(*ctx_, *keys_,
                                    std::get<RlwePayload>(ct.payload()),
                                    ct.level());
  }
  const auto value = encoding::centered(residue, ctx_->modulus_at(ct.level()));
  return encoding::ratio_to_double(value, static_cast<long double>(ct.scale()));
}

Evaluator::Evaluator(std::shared_ptr<const HeContext> ctx,
                     std::shared_ptr<const EvaluationKey> evaluation_key)
    : ctx_(std::move(ctx)), evk_(std::move(evaluation_key)) {
  if (evk_->backend != ctx_->backend()) {
    throw BackendMismatch("evaluation key belongs to a different backend");
  }
  if (ctx_->backend() == BackendKind::rlwe &&
      evk_->relin.size() != static_cast<std::size_t>(ctx_->total_digits())) {
    throw BackendMismatch("evaluation key does not match the modulus chain");
  }
}

void Evaluator::check_backend(const Ciphertext& ct) const {
  if (ct.backend() != ctx_->backend()) {
    throw BackendMismatch("ciphertext from a different backend");
  }
  if (ct.level() < 0 || ct.level() > ctx_->top_level()) {
    throw BackendMismatch("ciphertext level outside this context");
  }
}

void Evaluator::check_compatible(const Ciphertext& a, const Ciphertext& b,
                                 bool require_same_scale) const {
  check_backend(a);
  check_backend(b);
  if (a.level() != b.level()) {
    throw OperandMismatch("operands at different levels (" +
                          std::to_string(a.level()) + " vs " +
                          std::to_string(b.level()) + ")");
  }
  if (a.scale_power() != b.scale_power()) {
    throw OperandMismatch("operands with different scale_power");
  }
  if (require_same_scale && !same_scale(a.scale(), b.scale())) {
    throw OperandMismatch("operands with different scales");
  }
}

Ciphertext Evaluator::add(const Ciphertext& a, const Ciphertext& b) const {
  check_compatible(a, b, true);
  if (ctx_->backend() == BackendKind::reference) {
    return Ciphertext(a.backend(), a.level(), a.scale_power(), a.scale(),
                      detail::reference::add(*ctx_,
                                             std::get<ReferencePayload>(a.payload()),
                                             std::get<ReferencePayload>(b.payload()),
                                             a.level()));
  }
  return Ciphertext(a.backend(), a.level(), a.scale_power(), a.scale(),
                    detail::rlwe::add(*ctx_, std::get<RlwePayload>(a.payload()),
                                      std::get<RlwePayload>(b.payload())));
}

Ciphertext Evaluator::sub(const Ciphertext& a, const Ciphertext& b) const {
  check_compatible(a, b, true);
  if (ctx_->backend() == BackendKind::reference) {
    return Ciphertext(a.backend(), a.level(), a.scale_power(), a.scale(),
                      detail::reference::sub(*ctx_,
                                             std::get<ReferencePayload>(a.payload()),
                                             std::get<ReferencePayload>(b.payload()),
                                             a.level()));
  }
  return Ciphertext(a.backend(), a.level(), a.scale_power(), a.scale(),
                    detail::rlwe::sub(*ctx_, std::get<RlwePayload>(a.payload()),
                                      std::get<RlwePayload>(b.payload())));
}

Ciphertext Evaluator::multiply_raw(const Ciphertext& a,
                                   const Ciphertext& b) const {
  check_compatible(a, b, false);
  const int sp = a.scale_power() + b.scale_power();
  const double scale = a.scale() * b.scale();
  if (ctx_->backend() == BackendKind::reference) {
    return Ciphertext(a.backend(), a.level(), sp, scale,
                      detail::reference::multiply(
                          *ctx_, std::get<ReferencePayload>(a.payload()),
                          std::get<ReferencePayload>(b.payload()), a.level()));
  }
  return Ciphertext(a.backend(), a.level(), sp, scale,
                    detail::rlwe::multiply(*ctx_, *evk_,
                                           std::get<RlwePayload>(a.payload()),
                                           std::get<RlwePayload>(b.payload()),
                                           a.level()));
}

Ciphertext Evaluator::multiply(const Ciphertext& a, const Ciphertext& b) const {
  check_compatible(a, b, false);
  if (a.level() < 1) {
    throw LevelExhausted("multiply: no level left for the rescale");
  }
  return rescale(multiply_raw(a, b));
}

Ciphertext Evaluator::multiply_plain(const Ciphertext& a, double s) const {
  return multiply_plain(a, s, a.scale());
}

Ciphertext Evaluator::multiply_plain(const Ciphertext& a, double s,
                                     double result_scale) const {
  check_backend(a);
  if (a.level() < 1) {
    throw LevelExhausted("multiply_plain: no level left for the rescale");
  }
  if (!(result_scale > 0.0)) {
    throw ConfigError("multiply_plain: result scale must be positive");
  }
  // Encode s at the scale that the following division by q_level turns into
  // result_scale; the rounding of s is absorbed as an error of |s| / plain_scale.
  const double plain_scale =
      static_cast<double>(ctx_->prime(a.level())) * (result_scale / a.scale());
  const encoding::BigInt k = encoding::round_scaled(s, plain_scale);
  Ciphertext product;
  if (ctx_->backend() == BackendKind::reference) {
    product = Ciphertext(a.backend(), a.level(), a.scale_power(), a.scale(),
                         detail::reference::multiply_scalar(
                             *ctx_, std::get<ReferencePayload>(a.payload()), k,
                             a.level()));
  } else {
    product = Ciphertext(a.backend(), a.level(), a.scale_power(), a.scale(),
                         detail::rlwe::multiply_scalar(
                             *ctx_, std::get<RlwePayload>(a.payload()), k,
                             a.level()));
  }
  return rescale_unchecked(product, a.scale_power(), result_scale);
}

Ciphertext Evaluator::rescale(const Ciphertext& a) const {
  check_backend(a);
  if (a.level() < 1) throw LevelExhausted("rescale: ciphertext is at level 0");
  if (a.scale_power() < 2) {
    throw OperandMismatch("rescale: scale_power must be at least 2");
  }
  return rescale_unchecked(a, a.scale_power() - 1,
                           a.scale() / static_cast<double>(ctx_->prime(a.level())));
}

Ciphertext Evaluator::rescale_unchecked(const Ciphertext& a,
                                        int new_scale_power,
                                        double new_scale) const {
  if (ctx_->backend() == BackendKind::reference) {
    return Ciphertext(a.backend(), a.level() - 1, new_scale_power, new_scale,
                      detail::reference::rescale(
                          *ctx_, std::get<ReferencePayload>(a.payload()),
                          a.level()));
  }
  return Ciphertext(a.backend(), a.level() - 1, new_scale_power, new_scale,
                    detail::rlwe::rescale(*ctx_, std::get<RlwePayload>(a.payload()),
                                          a.level()));
}

Ciphertext Evaluator::drop_to_level(const Ciphertext& a, int level) const {
  check_backend(a);
  if (level < 0 || level > a.level()) {
    throw OperandMismatch("drop_to_level: target above current level");
  }
  if (level == a.level()) return a;
  if (ctx_->backend() == BackendKind::reference) {
    return Ciphertext(a.backend(), level, a.scale_power(), a.scale(),
                      detail::reference::drop(
                          *ctx_, std::get<ReferencePayload>(a.payload()), level));
  }
  return Ciphertext(a.backend(), level, a.scale_power(), a.scale(),
                    detail::rlwe::drop(std::get<RlwePayload>(a.payload()), level));
}

}  // namespace hetune::he
