#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "srfed/defe.hpp"

using namespace srfed;

namespace {

struct TestGroup {
  GroupWithFactors grp;
  PlaintextBound bound;
  CryptoRng rng;

  TestGroup(unsigned bits, Bigint dim, std::uint64_t seed = 1234) : rng(seed) {
    CryptoRng setup_rng(seed);
    grp = setup_group_keep_factors(bits, setup_rng);
    bound = PlaintextBound::derive(grp.params, dim);
  }
  const GroupParams& params() const { return grp.params; }
};

std::vector<ClientKeyPair> make_keys(const GroupParams& params, std::uint32_t count, CryptoRng& rng) {
  std::vector<ClientKeyPair> keys;
  for (std::uint32_t i = 1; i <= count; ++i)
    keys.push_back(keygen(params, i, rng, params.bit_length * 3));
  return keys;
}

std::vector<Bigint> pks_of(const std::vector<ClientKeyPair>& keys) {
  std::vector<Bigint> pks;
  for (const auto& k : keys) pks.push_back(k.h);
  return pks;
}

}  // namespace

TEST_CASE("keygen produces verified key pairs deterministically") {
  TestGroup tg(64, 4);
  CryptoRng r1(7), r2(7);
  auto kp1 = keygen(tg.params(), 1, r1, 192);
  auto kp2 = keygen(tg.params(), 1, r2, 192);
  CHECK(kp1.s > 0);
  CHECK(kp1.s == kp2.s);
  CHECK(kp1.h == kp2.h);
  CHECK(powmod(tg.params().g, kp1.s, tg.params().N_squared) == kp1.h);
}

TEST_CASE("randomness derivation is deterministic and domain separated") {
  Bigint sk = from_hex("abcdef0123456789");
  CHECK(derive_randomness(sk, 3, 7) == derive_randomness(sk, 3, 7));
  CHECK(derive_randomness(sk, 3, 7) != derive_randomness(sk, 3, 8));
  CHECK(derive_randomness(sk, 3, 7) != derive_randomness(sk, 4, 7));
  CHECK(derive_randomness(sk, 3, 7, "task-a") != derive_randomness(sk, 3, 7, "task-b"));
}

TEST_CASE("distinct secret keys yield collision-free randomness streams") {
  Bigint sk1 = from_hex("11"), sk2 = from_hex("22");
  std::set<Bigint> seen;
  const int per_key = 50000;
  for (int i = 0; i < per_key; ++i) {
    seen.insert(derive_randomness(sk1, 0, i));
    seen.insert(derive_randomness(sk2, 0, i));
  }
  CHECK(seen.size() == 2 * per_key);
}

TEST_CASE("noise chain recursion") {
  TestGroup tg(64, 4);
  auto keys = make_keys(tg.params(), 2, tg.rng);
  Bigint eta0 = 17;

  auto a = make_noise_chain(eta0);
  auto b = make_noise_chain(eta0);
  for (int step = 0; step < 5; ++step) {
    a = advance_noise(a, keys[0].h, step, tg.bound);
    b = advance_noise(b, keys[0].h, step, tg.bound);
    CHECK(a.current == b.current);
    CHECK(a.current >= 0);
    CHECK(a.current < tg.bound.M);
    CHECK(a.round == static_cast<std::uint64_t>(step) + 1);
  }

  // Three advances compose from eta_0.
  auto c = advance_noise(advance_noise(advance_noise(make_noise_chain(eta0), keys[0].h, 0, tg.bound),
                                       keys[0].h, 1, tg.bound),
                         keys[0].h, 2, tg.bound);
  auto d = make_noise_chain(eta0);
  for (int step = 0; step < 3; ++step) d = advance_noise(d, keys[0].h, step, tg.bound);
  CHECK(c.current == d.current);
}

TEST_CASE("single element encrypt/decrypt round trips") {
  TestGroup tg(64, 1);
  auto keys = make_keys(tg.params(), 1, tg.rng);
  const auto& kp = keys[0];

  SECTION("zero plaintext, zero noise") {
    auto ct = encrypt(tg.params(), kp, 0, 0, 0, 0, tg.bound);
    auto skf = funkeygen_projection(kp, std::vector<std::int64_t>{1}, 0, 0, 0);
    CHECK(agg_dec(tg.params(), skf.value, std::vector<Ciphertext>{ct},
                  std::vector<std::int64_t>{1}) == 0);
  }

  SECTION("noised plaintext decrypts to x plus eta") {
    auto ct = encrypt(tg.params(), kp, 3, 2, 0, 0, tg.bound);
    auto skf = funkeygen_projection(kp, std::vector<std::int64_t>{1}, 0, 0, 0);
    Bigint noised = agg_dec(tg.params(), skf.value, std::vector<Ciphertext>{ct},
                            std::vector<std::int64_t>{1});
    CHECK(noised == 5);
    std::vector<Bigint> noise{2};
    CHECK(usr_dec(noised, noise, std::vector<std::int64_t>{1}) == 3);
  }

  SECTION("same plaintext at different element indices differs") {
    auto ct1 = encrypt(tg.params(), kp, 9, 0, 0, 0, tg.bound);
    auto ct2 = encrypt(tg.params(), kp, 9, 0, 0, 1, tg.bound);
    auto ct3 = encrypt(tg.params(), kp, 9, 0, 1, 0, tg.bound);
    CHECK(ct1.value != ct2.value);
    CHECK(ct1.value != ct3.value);
  }

  SECTION("plaintext bound is enforced") {
    CHECK_THROWS_AS(encrypt(tg.params(), kp, tg.bound.X, 0, 0, 0, tg.bound), std::domain_error);
    CHECK_THROWS_AS(encrypt(tg.params(), kp, -tg.bound.X, 0, 0, 0, tg.bound), std::domain_error);
  }
}

TEST_CASE("projection key generation") {
  TestGroup tg(64, 4);
  auto keys = make_keys(tg.params(), 1, tg.rng);
  const auto& kp = keys[0];

  SECTION("zero vector gives zero key") {
    std::vector<std::int64_t> y{0, 0, 0, 0};
    CHECK(funkeygen_projection(kp, y, 2, 0, 0).value == 0);
  }

  SECTION("single element is r times c") {
    std::vector<std::int64_t> y{-37};
    auto key = funkeygen_projection(kp, y, 2, 1, 5);
    CHECK(key.value == derive_randomness(kp.s, 2, 5) * -37);
    CHECK(key.layer_index == 1);
  }

  SECTION("linear in y") {
    std::vector<std::int64_t> y1{3, -1, 4, 1}, y2{2, 7, -8, 2}, sum{5, 6, -4, 3};
    CHECK(funkeygen_projection(kp, y1, 0, 0, 0).value + funkeygen_projection(kp, y2, 0, 0, 0).value ==
          funkeygen_projection(kp, sum, 0, 0, 0).value);
  }
}

TEST_CASE("Diffie-Hellman symmetry of pairwise secrets") {
  TestGroup tg(64, 4);
  auto keys = make_keys(tg.params(), 4, tg.rng);
  for (std::size_t i = 0; i < keys.size(); ++i)
    for (std::size_t j = i + 1; j < keys.size(); ++j)
      CHECK(powmod(keys[j].h, keys[i].s, tg.params().N_squared) ==
            powmod(keys[i].h, keys[j].s, tg.params().N_squared));
}

TEST_CASE("partial aggregation keys") {
  TestGroup tg(64, 8);

  SECTION("single client has no masks") {
    auto keys = make_keys(tg.params(), 1, tg.rng);
    auto pks = pks_of(keys);
    auto part = funkeygen_partial(tg.params(), keys[0], pks, 1, 3, 4);
    for (std::size_t eps = 0; eps < 4; ++eps)
      CHECK(part.values[eps] == derive_randomness(keys[0].s, 3, eps));
  }

  SECTION("two clients: masks cancel pairwise") {
    auto keys = make_keys(tg.params(), 2, tg.rng);
    auto pks = pks_of(keys);
    auto p1 = funkeygen_partial(tg.params(), keys[0], pks, 1, 0, 4);
    auto p2 = funkeygen_partial(tg.params(), keys[1], pks, 1, 0, 4);
    for (std::size_t eps = 0; eps < 4; ++eps)
      CHECK(p1.values[eps] + p2.values[eps] ==
            derive_randomness(keys[0].s, 0, eps) + derive_randomness(keys[1].s, 0, eps));
  }

  SECTION("five clients, random selection vector, against secret-key oracle") {
    auto keys = make_keys(tg.params(), 5, tg.rng);
    auto pks = pks_of(keys);
    std::vector<int> gamma{1, 0, 1, 1, 0};
    std::vector<PartialAggKey> parts;
    for (std::size_t i = 0; i < keys.size(); ++i)
      parts.push_back(funkeygen_partial(tg.params(), keys[i], pks, gamma[i], 1, 6));
    auto skf = funkey_agg(parts);
    for (std::size_t eps = 0; eps < 6; ++eps) {
      Bigint expect = 0;
      for (std::size_t i = 0; i < keys.size(); ++i)
        if (gamma[i]) expect += derive_randomness(keys[i].s, 1, eps);
      REQUIRE(skf[eps] == expect);
    }
  }

  SECTION("all gamma zero telescopes to the zero key") {
    auto keys = make_keys(tg.params(), 3, tg.rng);
    auto pks = pks_of(keys);
    std::vector<PartialAggKey> parts;
    for (std::size_t i = 0; i < keys.size(); ++i)
      parts.push_back(funkeygen_partial(tg.params(), keys[i], pks, 0, 2, 3));
    for (const Bigint& v : funkey_agg(parts)) CHECK(v == 0);
  }

  SECTION("aggregation validates rounds and lengths") {
    auto keys = make_keys(tg.params(), 2, tg.rng);
    auto pks = pks_of(keys);
    auto a = funkeygen_partial(tg.params(), keys[0], pks, 1, 0, 4);
    auto b = funkeygen_partial(tg.params(), keys[1], pks, 1, 1, 4);
    std::vector<PartialAggKey> bad{a, b};
    CHECK_THROWS_AS(funkey_agg(bad), std::invalid_argument);
    auto c = funkeygen_partial(tg.params(), keys[1], pks, 1, 0, 3);
    std::vector<PartialAggKey> bad2{a, c};
    CHECK_THROWS_AS(funkey_agg(bad2), std::invalid_argument);
  }
}

TEST_CASE("aggregation decryption on the pinned tiny group") {
  CryptoRng grng(5);
  auto grp = make_group_from_primes(11, 23, grng);
  PlaintextBound bound;
  bound.X = 4;
  bound.Y = 4;
  bound.M = 5;
  bound.I = 2;
  CryptoRng krng(6);
  auto kp = keygen(grp.params, 1, krng, 24);

  SECTION("inner product (3,1)x(2,5) = 11") {
    std::vector<Ciphertext> cts{encrypt(grp.params, kp, 3, 0, 0, 0, bound),
                                encrypt(grp.params, kp, 1, 0, 0, 1, bound)};
    std::vector<std::int64_t> y{2, 5};
    auto skf = funkeygen_projection(kp, y, 0, 0, 0);
    CHECK(agg_dec(grp.params, skf.value, cts, y) == 11);
  }

  SECTION("all-zero key vector decrypts to zero") {
    std::vector<Ciphertext> cts{encrypt(grp.params, kp, 3, 0, 0, 0, bound),
                                encrypt(grp.params, kp, 1, 0, 0, 1, bound)};
    std::vector<std::int64_t> y{0, 0};
    CHECK(agg_dec(grp.params, Bigint(0), cts, y) == 0);
  }

  SECTION("negative key component") {
    std::vector<Ciphertext> cts{encrypt(grp.params, kp, 3, 1, 0, 0, bound)};  // x' = 4
    std::vector<std::int64_t> y{-3};
    auto skf = funkeygen_projection(kp, y, 0, 0, 0);
    CHECK(agg_dec(grp.params, skf.value, cts, y) == -12);
  }

  SECTION("mismatched key detected via divisibility") {
    std::vector<Ciphertext> cts{encrypt(grp.params, kp, 3, 0, 0, 0, bound)};
    std::vector<std::int64_t> y{2};
    CHECK_THROWS_AS(agg_dec(grp.params, Bigint(12345), cts, y), std::domain_error);
  }
}

TEST_CASE("usr_dec arithmetic") {
  std::vector<Bigint> zeros{0, 0};
  std::vector<std::int64_t> y{1, 1};
  CHECK(usr_dec(10, zeros, y) == 10);
  std::vector<Bigint> etas{2, 2};
  CHECK(usr_dec(10, etas, y) == 6);
  std::vector<Bigint> one{1};
  CHECK_THROWS_AS(usr_dec(10, one, y), std::invalid_argument);
}

TEST_CASE("full pipeline recovers exact inner products") {
  const std::size_t dim = 4;
  TestGroup tg(128, dim, 77);
  auto keys = make_keys(tg.params(), dim, tg.rng);
  auto pks = pks_of(keys);

  CryptoRng vals(91);
  const long value_range = 20000;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint64_t round = trial;
    std::vector<Bigint> x(dim), etas(dim);
    std::vector<std::int64_t> y(dim);
    Bigint expect = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = vals.uniform_below(2 * value_range + 1) - value_range;
      etas[i] = vals.uniform_below(tg.bound.M);
      y[i] = vals.uniform_below(2 * value_range + 1).get_si() - value_range;
      expect += x[i] * y[i];
    }

    // Each client encrypts one component under a common counter position and
    // contributes a masked partial key for its own y component.
    std::vector<Ciphertext> cts;
    std::vector<PartialAggKey> parts;
    for (std::size_t i = 0; i < dim; ++i) {
      cts.push_back(encrypt(tg.params(), keys[i], x[i], etas[i], round, 0, tg.bound));
      parts.push_back(funkeygen_partial(tg.params(), keys[i], pks, y[i], round, 1));
    }
    Bigint skf = funkey_agg(parts)[0];

    Bigint noised = agg_dec(tg.params(), skf, cts, y);
    Bigint recovered = usr_dec(noised, etas, y);
    REQUIRE(recovered == expect);
  }
}
