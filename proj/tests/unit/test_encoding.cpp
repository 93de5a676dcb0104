#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "hetune/encoding.hpp"

using namespace hetune::encoding;

namespace {

FixedPointParams small() { return {100.0, BigInt(65536)}; }
FixedPointParams wide() { return {0x1p40, BigInt(1) << 160}; }

EncodedInt raw(long v, int sp = 1) {
  EncodedInt e;
  e.value = v;
  e.scale_power = sp;
  return e;
}

}  // namespace

TEST_CASE("encode examples") {
  auto a = encode(1.234, small());
  CHECK(a.value == 123);
  CHECK(a.scale_power == 1);
  CHECK_FALSE(a.range_warning);
  CHECK(encode(-0.5, small()).value == 65486);
  CHECK(encode(0.0, wide()).value == 0);
}

TEST_CASE("ties round away from zero") {
  CHECK(encode(0.005, FixedPointParams{1000.0, BigInt(65536)}).value == 5);
  CHECK(round_scaled(2.5, 1.0) == 3);
  CHECK(round_scaled(-2.5, 1.0) == -3);
  CHECK(round_scaled(0.5, 1.0) == 1);
  CHECK(round_scaled(-0.5, 1.0) == -1);
  CHECK(round_scaled(0.49999999999999994, 1.0) == 0);
}

TEST_CASE("range warning on wraparound") {
  CHECK(encode(327.67, small()).range_warning == false);
  CHECK(encode(327.68, small()).range_warning == true);
  CHECK(encode(-400.0, small()).range_warning == true);
}

TEST_CASE("mu branches") {
  CHECK(mu(raw(65486), small()) == -50);
  CHECK(mu(raw(123), small()) == 123);
  CHECK(mu(raw(32768), small()) == -32768);
  CHECK(mu(raw(32767), small()) == 32767);
}

TEST_CASE("decode examples") {
  CHECK(decode(raw(123), small()) == doctest::Approx(1.23).epsilon(1e-15));
  CHECK(decode(raw(65486), small()) == -0.5);
  const double pi = std::numbers::pi;
  CHECK(std::abs(decode(encode(pi, wide()), wide()) - pi) <= 0x1p-41);
}

TEST_CASE("reduce and centered handle both signs") {
  const BigInt q = 17;
  CHECK(reduce(BigInt(-1), q) == 16);
  CHECK(reduce(BigInt(-34), q) == 0);
  CHECK(reduce(BigInt(40), q) == 6);
  CHECK(centered(BigInt(9), q) == -8);
  CHECK(centered(BigInt(8), q) == 8);
}

TEST_CASE("roundtrip bound on both parameter sets") {
  std::mt19937_64 rng(7);
  for (const auto& p : {small(), wide()}) {
    const double half_q = static_cast<double>(p.modulus_q) / 2.0;
    const double bound = (half_q - 2.0) / p.scale_c;
    std::uniform_real_distribution<double> dist(-bound, bound);
    int violations = 0;
    for (int i = 0; i < 100000; ++i) {
      const double x = dist(rng);
      if (std::abs(x - decode(encode(x, p), p)) > 1.0 / (2.0 * p.scale_c)) ++violations;
    }
    CHECK(violations == 0);
  }
}

TEST_CASE("additive compatibility") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-100.0, 100.0);
  const auto p = small();
  for (int i = 0; i < 2000; ++i) {
    const double x = dist(rng), y = dist(rng);
    const double s = decode(add(encode(x, p), encode(y, p), p), p);
    CHECK(std::abs(s - decode(encode(x + y, p), p)) <= 1.0 / p.scale_c + 1e-12);
  }
}

TEST_CASE("multiplicative scale growth") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const auto p = small();
  for (int i = 0; i < 2000; ++i) {
    const double x = dist(rng), y = dist(rng);
    const auto prod = multiply(encode(x, p), encode(y, p), p);
    CHECK(prod.scale_power == 2);
    const double tol = (std::abs(x) + std::abs(y) + 1.0) / (2.0 * p.scale_c) +
                       1.0 / (4.0 * p.scale_c * p.scale_c);
    CHECK(std::abs(decode(prod, p) - x * y) <= tol + 1e-12);
  }
}

TEST_CASE("add rejects mismatched scale powers") {
  const auto p = small();
  CHECK_THROWS(add(raw(1, 1), raw(1, 2), p));
}

TEST_CASE("invalid params") {
  CHECK_THROWS(FixedPointParams{0.5, BigInt(100)}.validate());
  CHECK_THROWS(FixedPointParams{10.0, BigInt(1)}.validate());
  CHECK_NOTHROW(small().validate());
}
