#pragma once

// Fixed-point mapping of reals into Z_q and back.
//
// A real x is represented by the integer round(c * x) mod q. Products of two
// encodings carry the scale c^2, so every encoded value keeps an explicit
// scale_power; reconstruction divides by c^scale_power after lifting the
// residue into the centered range [-q/2, q/2).

#include <boost/multiprecision/cpp_int.hpp>

namespace hetune::encoding {

using BigInt = boost::multiprecision::cpp_int;

struct FixedPointParams {
  double scale_c = 1.0;
  BigInt modulus_q = 2;

  /// Throws std::invalid_argument unless scale_c >= 1 and modulus_q >= 2.
  void validate() const;
};

struct EncodedInt {
  BigInt value;  // canonical representative in [0, q)
  int scale_power = 1;
  // Set by encode() when |c x| >= q/2, i.e. the value wrapped around and
  // decode() no longer reconstructs it.
  bool range_warning = false;
};

/// Exact round(scale * x), ties away from zero. Both factors are binary
/// fractions, so the product is formed exactly before rounding.
BigInt round_scaled(double x, double scale);

/// z mod q in [0, q), for any sign of z.
BigInt reduce(const BigInt& z, const BigInt& q);

/// Centered lift: value - q if value >= q/2, else value.
BigInt centered(const BigInt& value, const BigInt& q);

/// Nearest double to num / den (long double intermediate).
double ratio_to_double(const BigInt& num, long double den);

EncodedInt encode(double x, const FixedPointParams& p);
BigInt mu(const EncodedInt& v, const FixedPointParams& p);
double decode(const EncodedInt& v, const FixedPointParams& p);

/// Plaintext-space sum; operands must share scale_power.
EncodedInt add(const EncodedInt& a, const EncodedInt& b,
               const FixedPointParams& p);
/// Plaintext-space product; scale powers add.
EncodedInt multiply(const EncodedInt& a, const EncodedInt& b,
                    const FixedPointParams& p);

}  // namespace hetune::encoding
