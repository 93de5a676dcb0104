#include "hetune/encoding.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hetune::encoding {

namespace {

// x = mantissa * 2^exponent with an integral 53-bit mantissa.
struct BinaryFraction {
  std::int64_t mantissa;
  int exponent;
};

BinaryFraction split(double x) {
  int e = 0;
  const double m = std::frexp(x, &e);
  return {static_cast<std::int64_t>(std::ldexp(m, 53)), e - 53};
}

}  // namespace

void FixedPointParams::validate() const {
  if (!(scale_c >= 1.0) || !std::isfinite(scale_c)) {
    throw std::invalid_argument("scale_c must be a finite real >= 1");
  }
  if (modulus_q < 2) {
    throw std::invalid_argument("modulus_q must be >= 2");
  }
}

BigInt round_scaled(double x, double scale) {
  if (!std::isfinite(x) || !std::isfinite(scale)) {
    throw std::invalid_argument("round_scaled: non-finite operand");
  }
  if (x == 0.0 || scale == 0.0) return 0;
  const auto fx = split(x);
  const auto fs = split(scale);
  BigInt product = BigInt(fx.mantissa) * BigInt(fs.mantissa);
  const bool negative = product < 0;
  if (negative) product = -product;
  const int exponent = fx.exponent + fs.exponent;

  BigInt magnitude;
  if (exponent >= 0) {
    magnitude = product << exponent;
  } else {
    const unsigned shift = static_cast<unsigned>(-exponent);
    magnitude = product >> shift;
    const BigInt remainder = product - (magnitude << shift);
    const BigInt half = BigInt(1) << (shift - 1);
    if (remainder >= half) ++magnitude;
  }
  return negative ? BigInt(-magnitude) : magnitude;
}

BigInt reduce(const BigInt& z, const BigInt& q) {
  BigInt r = z % q;
  if (r < 0) r += q;
  return r;
}

BigInt centered(const BigInt& value, const BigInt& q) {
  // value >= q/2  <=>  2 value >= q
  if (2 * value >= q) return value - q;
  return value;
}

double ratio_to_double(const BigInt& num, long double den) {
  return static_cast<double>(num.convert_to<long double>() / den);
}

EncodedInt encode(double x, const FixedPointParams& p) {
  const BigInt scaled = round_scaled(x, p.scale_c);
  EncodedInt out;
  out.value = reduce(scaled, p.modulus_q);
  out.scale_power = 1;
  const BigInt magnitude = scaled < 0 ? BigInt(-scaled) : scaled;
  out.range_warning = 2 * magnitude >= p.modulus_q;
  return out;
}

BigInt mu(const EncodedInt& v, const FixedPointParams& p) {
  return centered(v.value, p.modulus_q);
}

double decode(const EncodedInt& v, const FixedPointParams& p) {
  const long double scale =
      std::pow(static_cast<long double>(p.scale_c), v.scale_power);
  return ratio_to_double(mu(v, p), scale);
}

EncodedInt add(const EncodedInt& a, const EncodedInt& b,
               const FixedPointParams& p) {
  if (a.scale_power != b.scale_power) {
    throw std::invalid_argument("encoding::add: scale_power mismatch");
  }
  return {reduce(a.value + b.value, p.modulus_q), a.scale_power, false};
}

EncodedInt multiply(const EncodedInt& a, const EncodedInt& b,
                    const FixedPointParams& p) {
  return {reduce(a.value * b.value, p.modulus_q),
          a.scale_power + b.scale_power, false};
}

}  // namespace hetune::encoding
