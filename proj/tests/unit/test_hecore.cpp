#include <cmath>
#include <random>
#include <set>

#include <doctest.h>

#include "hetune/errors.hpp"
#include "hetune/hecore/context.hpp"
#include "hetune/hecore/evaluator.hpp"
#include "hetune/hecore/keys.hpp"
#include "hetune/hecore/modarith.hpp"
#include "hetune/hecore/ntt.hpp"
#include "hetune/hecore/prng.hpp"
#include "hetune/hecore/serialize.hpp"

using namespace hetune;
using namespace hetune::he;

namespace {

struct Fixture {
  std::shared_ptr<const HeContext> ctx;
  std::shared_ptr<const SecretKeyMaterial> keys;
  std::unique_ptr<Encryptor> enc;
  std::unique_ptr<Decryptor> dec;
  std::unique_ptr<Evaluator> eval;

  explicit Fixture(const HeParams& p, std::uint64_t seed = 1) {
    ctx = HeContext::create(p);
    ChaChaRng rng(seed);
    keys = std::make_shared<SecretKeyMaterial>(keygen(*ctx, rng));
    enc = std::make_unique<Encryptor>(ctx, keys, ChaChaRng(seed + 1000));
    dec = std::make_unique<Decryptor>(ctx, keys);
    eval = std::make_unique<Evaluator>(ctx, keys->evaluation_key());
  }
};

double tolerance(BackendKind b) { return b == BackendKind::reference ? 1e-6 : 1e-3; }

}  // namespace

TEST_CASE("modular helpers") {
  const u64 q = 0xffffffff00000001ULL;
  CHECK(is_prime(q));
  CHECK_FALSE(is_prime(q - 2));
  CHECK(mul_mod(inv_mod(12345, q), 12345, q) == 1);
  CHECK(pow_mod(3, q - 1, q) == 1);
  // Shoup products are specified for word primes below 2^62.
  const u64 p61 = ntt_primes_below(61, 1, 2048)[0];
  const u64 w = 987654321987ULL % p61;
  const u64 ws = shoup_precompute(w, p61);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const u64 a = rng() % p61;
    CHECK(mul_shoup(a, w, ws, p61) == mul_mod(a, w, p61));
  }
  const auto primes = ntt_primes_below(40, 4, 2048);
  REQUIRE(primes.size() == 4);
  for (auto p : primes) {
    CHECK(is_prime(p));
    CHECK(p % 4096 == 1);
    CHECK(p < (u64{1} << 40));
  }
  const u64 psi = primitive_root_2n(primes[0], 2048);
  CHECK(pow_mod(psi, 2048, primes[0]) == primes[0] - 1);
}

TEST_CASE("NTT product equals schoolbook negacyclic product") {
  for (std::size_t n : {8u, 64u, 1024u}) {
    const u64 q = ntt_primes_below(50, 1, n)[0];
    NttTables t(q, n);
    std::mt19937_64 rng(n);
    std::vector<u64> a(n), b(n);
    for (auto& x : a) x = rng() % q;
    for (auto& x : b) x = rng() % q;
    const auto expected = negacyclic_multiply_schoolbook(a, b, q);
    auto fa = a, fb = b;
    t.forward(fa);
    t.forward(fb);
    for (std::size_t i = 0; i < n; ++i) fa[i] = mul_mod(fa[i], fb[i], q);
    t.inverse(fa);
    CHECK(fa == expected);
    auto round = a;
    t.forward(round);
    t.inverse(round);
    CHECK(round == a);
  }
}

TEST_CASE("schoolbook wraps with a sign") {
  // X^(n-1) * X = X^n = -1
  const u64 q = 97;
  std::vector<u64> a(4, 0), b(4, 0);
  a[3] = 1;
  b[1] = 1;
  const auto c = negacyclic_multiply_schoolbook(a, b, q);
  CHECK(c == std::vector<u64>{96, 0, 0, 0});
}

TEST_CASE("ChaCha generator is reproducible") {
  ChaChaRng a(5), b(5), c(6);
  bool differs = false;
  for (int i = 0; i < 200; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs = differs || x != c();
  }
  CHECK(differs);
}

TEST_CASE("parameter presets and validation") {
  const auto p = HeParams::paper(BackendKind::rlwe);
  CHECK(p.ring_dimension == 2048);
  CHECK(p.modulus_chain.size() == 5);
  CHECK(p.levels() == 4);
  CHECK(p.chain_product() >= (encoding::BigInt(1) << 160));
  CHECK(HeParams::preset("test-reference").backend == BackendKind::reference);
  CHECK_THROWS_AS(HeParams::preset("bogus"), ConfigError);
  auto bad = p;
  bad.ring_dimension = 1000;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.modulus_chain[2] = bad.modulus_chain[1];
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = p;
  bad.modulus_chain[1] += 2;  // no longer 1 mod 2n
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("keygen shapes") {
  Fixture ref(HeParams::test(BackendKind::reference));
  CHECK(ref.keys->secret().empty());
  CHECK(ref.keys->evaluation_key()->relin.empty());

  Fixture r1(HeParams::test(BackendKind::rlwe), 1);
  Fixture r2(HeParams::test(BackendKind::rlwe), 2);
  CHECK(r1.keys->ring_dimension() == 1024);
  CHECK(r1.keys->secret() != r2.keys->secret());
  for (auto s : r1.keys->secret()) CHECK((s >= -1 && s <= 1));
}

TEST_CASE_TEMPLATE_DEFINE("homomorphism suite", T, homomorphism) {
  const BackendKind kind = T::value;
  Fixture f(HeParams::test(kind));
  const double eps = tolerance(kind);
  const int L = f.ctx->top_level();

  SUBCASE("enc/dec examples") {
    for (double x : {0.0, 1.5, -0.01}) CHECK(std::abs(f.dec->decrypt(f.enc->encrypt(x)) - x) <= eps);
    const auto ct = f.enc->encrypt(1.5);
    CHECK(level_of(ct) == L);
    CHECK(ct.scale_power() == 1);
  }

  SUBCASE("add, sub and identities") {
    auto two = f.enc->encrypt(2.0), three = f.enc->encrypt(3.0);
    CHECK(std::abs(f.dec->decrypt(f.eval->add(two, three)) - 5.0) <= eps);
    CHECK(std::abs(f.dec->decrypt(f.eval->sub(two, three)) + 1.0) <= eps);
    CHECK(std::abs(f.dec->decrypt(f.eval->add(two, f.enc->encrypt(0.0))) - 2.0) <= eps);
    CHECK(level_of(f.eval->add(two, three)) == L);
  }

  SUBCASE("mult and mult_plain") {
    auto six = f.eval->multiply(f.enc->encrypt(2.0), f.enc->encrypt(3.0));
    CHECK(std::abs(f.dec->decrypt(six) - 6.0) <= eps);
    CHECK(level_of(six) == L - 1);
    CHECK(six.scale_power() == 1);
    CHECK(std::abs(f.dec->decrypt(f.eval->multiply(f.enc->encrypt(0.7), f.enc->encrypt(1.0))) - 0.7) <= eps);
    CHECK(std::abs(f.dec->decrypt(f.eval->multiply_plain(f.enc->encrypt(4.0), 0.5)) - 2.0) <= eps);
    CHECK(std::abs(f.dec->decrypt(f.eval->multiply_plain(f.enc->encrypt(-3.25), 1.0)) + 3.25) <= eps);
    CHECK(std::abs(f.dec->decrypt(f.eval->multiply_plain(f.enc->encrypt(-3.25), 0.0))) <= eps);
    CHECK(level_of(f.eval->multiply_plain(f.enc->encrypt(1.0), 2.0)) == L - 1);
  }

  SUBCASE("random pairs in [-10, 10]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    double worst_add = 0.0, worst_mul = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double a = dist(rng), b = dist(rng);
      const auto ca = f.enc->encrypt(a), cb = f.enc->encrypt(b);
      worst_add = std::max(worst_add, std::abs(f.dec->decrypt(f.eval->add(ca, cb)) - (a + b)));
      worst_mul = std::max(worst_mul, std::abs(f.dec->decrypt(f.eval->multiply(ca, cb)) - a * b));
    }
    CHECK(worst_add <= eps);
    CHECK(worst_mul <= eps);
  }

  SUBCASE("raw product and explicit rescales") {
    const auto raw = f.eval->multiply_raw(f.enc->encrypt(1.25), f.enc->encrypt(-2.0));
    CHECK(raw.scale_power() == 2);
    CHECK(level_of(raw) == L);
    CHECK(std::abs(f.dec->decrypt(raw) + 2.5) <= eps);
    const auto r = f.eval->rescale(raw);
    CHECK(r.scale_power() == 1);
    CHECK(level_of(r) == L - 1);
    CHECK(std::abs(f.dec->decrypt(r) - f.dec->decrypt(raw)) <= eps);
    CHECK_THROWS_AS(f.eval->rescale(f.enc->encrypt(1.0)), OperandMismatch);

    // Two rescales: value survives at level L-2.
    auto one = f.enc->encrypt(1.0);
    auto t = f.eval->rescale(f.eval->multiply_raw(f.eval->rescale(f.eval->multiply_raw(one, one)),
                                                  f.eval->drop_to_level(one, L - 1)));
    CHECK(level_of(t) == L - 2);
    CHECK(std::abs(f.dec->decrypt(t) - 1.0) <= eps);
  }

  SUBCASE("level budget: four mults then exhaustion") {
    auto ct = f.enc->encrypt(1.1);
    const auto factor = f.enc->encrypt(1.0);
    double expected = 1.1;
    for (int i = 0; i < L; ++i) {
      ct = f.eval->multiply(ct, f.eval->drop_to_level(factor, ct.level()));
      CHECK(level_of(ct) == L - 1 - i);
    }
    CHECK(std::abs(f.dec->decrypt(ct) - expected) <= eps);
    CHECK_THROWS_AS(f.eval->multiply(ct, f.eval->drop_to_level(factor, 0)), LevelExhausted);
    CHECK_THROWS_AS(f.eval->multiply_plain(ct, 2.0), LevelExhausted);
    const auto sq = f.eval->multiply_raw(ct, f.eval->drop_to_level(factor, 0));
    CHECK_THROWS_AS(f.eval->rescale(sq), LevelExhausted);
  }

  SUBCASE("operand checks") {
    const auto a = f.enc->encrypt(1.0);
    const auto b = f.eval->multiply(a, a);
    CHECK_THROWS_AS(f.eval->add(a, b), OperandMismatch);
    CHECK_THROWS_AS(f.eval->add(a, f.eval->multiply_raw(a, a)), OperandMismatch);
    CHECK_THROWS_AS(f.eval->drop_to_level(b, L), OperandMismatch);
    CHECK_THROWS_AS(f.enc->encrypt(1e60), RangeError);
  }

  SUBCASE("serialization roundtrip") {
    const auto ct = f.eval->multiply(f.enc->encrypt(0.3), f.enc->encrypt(0.2));
    const auto bytes = serialize(ct);
    const auto back = deserialize_ciphertext(bytes, *f.ctx);
    CHECK(back == ct);
    CHECK(serialize(back) == bytes);
    auto truncated = bytes;
    truncated.pop_back();
    CHECK_THROWS_AS(deserialize_ciphertext(truncated, *f.ctx), FormatError);
    const auto keys = deserialize_secret_key(serialize(*f.keys), *f.ctx);
    CHECK(keys.secret() == f.keys->secret());
    CHECK(keys.secret_ntt() == f.keys->secret_ntt());
    CHECK(*keys.evaluation_key() == *f.keys->evaluation_key());
    CHECK(deserialize_evaluation_key(serialize(*f.keys->evaluation_key()), *f.ctx) ==
          *f.keys->evaluation_key());
  }
}

TEST_CASE_TEMPLATE_INVOKE(homomorphism,
                          std::integral_constant<BackendKind, BackendKind::reference>,
                          std::integral_constant<BackendKind, BackendKind::rlwe>);

TEST_CASE("reference backend is deterministic, RLWE is randomized") {
  Fixture ref(HeParams::test(BackendKind::reference));
  CHECK(ref.enc->encrypt(0.125) == ref.enc->encrypt(0.125));
  Fixture rl(HeParams::test(BackendKind::rlwe));
  CHECK(rl.enc->encrypt(0.125) != rl.enc->encrypt(0.125));
}

TEST_CASE("backend mismatch is reported") {
  Fixture ref(HeParams::test(BackendKind::reference));
  Fixture rl(HeParams::test(BackendKind::rlwe));
  const auto ct = rl.enc->encrypt(1.0);
  CHECK_THROWS_AS(ref.dec->decrypt(ct), BackendMismatch);
  CHECK_THROWS_AS(ref.eval->add(ct, ct), BackendMismatch);
  CHECK_THROWS_AS(Evaluator(rl.ctx, ref.keys->evaluation_key()), BackendMismatch);
  CHECK_THROWS_AS(deserialize_ciphertext(serialize(ct), *ref.ctx), FormatError);
}

TEST_CASE("base64 and params json") {
  const Bytes data{0, 1, 2, 250, 251, 255, 7};
  CHECK(base64_decode(base64_encode(data)) == data);
  CHECK(base64_encode(Bytes{'f', 'o', 'o'}) == "Zm9v");
  CHECK_THROWS_AS(base64_decode("***"), FormatError);
  const auto p = HeParams::test(BackendKind::rlwe);
  CHECK(params_from_json(params_to_json(p)) == p);
  CHECK(params_from_json({{"preset", "paper"}}) == HeParams::paper(BackendKind::rlwe));
  CHECK_THROWS_AS(params_from_json({{"preset", "nope"}}), ConfigError);
}
