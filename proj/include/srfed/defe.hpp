#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "srfed/bigint.hpp"
#include "srfed/hash.hpp"
#include "srfed/numtheory.hpp"

namespace srfed {

struct ClientKeyPair {
  Bigint s;                       // secret exponent
  Bigint h;                       // public key g^s mod N^2
  std::uint32_t client_index = 0; // 1-based
};

struct Ciphertext {
  Bigint value;  // (1+N)^{x'} * g^r mod N^2
  std::uint64_t round = 0;
  std::uint64_t element_index = 0;
};

// Shared noise evolving by eta_t = H1(eta_{t-1}, pk, ctr) mod M.
struct NoiseChain {
  Bigint eta0;
  Bigint current;
  std::uint64_t round = 0;
};

struct PartialAggKey {
  std::vector<Bigint> values;  // one per model element
  std::uint32_t client_index = 0;
  std::uint64_t round = 0;
};

struct ProjectionKey {
  Bigint value;  // sum over the layer of r_i^{t,eps} * y[eps], over the signed integers
  std::uint32_t layer_index = 0;
  std::uint32_t client_index = 0;
  std::uint64_t round = 0;
};

inline ClientKeyPair keygen(const GroupParams& params, std::uint32_t client_index, CryptoRng& rng,
                            unsigned sigma_bits) {
  ClientKeyPair kp;
  kp.client_index = client_index;
  do {
    kp.s = rng.uniform_bits(sigma_bits);
  } while (kp.s == 0);
  kp.h = powmod(params.g, kp.s, params.N_squared);
  return kp;
}

inline Bigint derive_randomness(const Bigint& sk, std::uint64_t round, std::uint64_t element_index,
                                std::string_view aux = {}) {
  return h1_randomness(sk, round, element_index, aux);
}

inline NoiseChain make_noise_chain(const Bigint& eta0) { return NoiseChain{eta0, eta0, 0}; }

inline NoiseChain advance_noise(const NoiseChain& chain, const Bigint& pk, std::uint64_t ctr,
                                const PlaintextBound& bound) {
  NoiseChain next;
  next.eta0 = chain.eta0;
  next.current = mod_floor(h1_noise(chain.current, pk, ctr), bound.M);
  next.round = chain.round + 1;
  return next;
}

inline Ciphertext encrypt(const GroupParams& params, const ClientKeyPair& kp, const Bigint& x,
                          const Bigint& eta, std::uint64_t round, std::uint64_t element_index,
                          const PlaintextBound& bound, std::string_view aux = {}) {
  Bigint abs_x = abs(x);
  if (abs_x >= bound.X)
    throw std::domain_error("encrypt: |x| exceeds the plaintext bound X");
  const Bigint x_noised = mod_floor(x + eta, params.N);
  const Bigint r = derive_randomness(kp.s, round, element_index, aux);
  Ciphertext ct;
  ct.round = round;
  ct.element_index = element_index;
  // (1+N)^m mod N^2 == 1 + m*N mod N^2, so only g^r needs an exponentiation.
  ct.value = mod_floor((1 + x_noised * params.N) * powmod(params.g, r, params.N_squared),
                       params.N_squared);
  return ct;
}

inline ProjectionKey funkeygen_projection(const ClientKeyPair& kp, std::span<const std::int64_t> y,
                                          std::uint64_t round, std::uint32_t layer_index,
                                          std::uint64_t element_offset, std::string_view aux = {}) {
  ProjectionKey key;
  key.layer_index = layer_index;
  key.client_index = kp.client_index;
  key.round = round;
  key.value = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 0) continue;
    key.value += derive_randomness(kp.s, round, element_offset + i, aux) * y[i];
  }
  return key;
}

// Partial aggregation key for this client's key-vector component y_i (the
// selection weight gamma_i in the aggregation protocol). Pairwise masks from
// DH shared secrets telescope away once all I partials are summed.
inline PartialAggKey funkeygen_partial(const GroupParams& params, const ClientKeyPair& kp,
                                       std::span<const Bigint> all_pks, std::int64_t y_i,
                                       std::uint64_t round, std::size_t element_count,
                                       std::string_view aux = {}) {
  if (kp.client_index == 0 || kp.client_index > all_pks.size())
    throw std::invalid_argument("funkeygen_partial: client_index outside the key list");
  PartialAggKey key;
  key.client_index = kp.client_index;
  key.round = round;
  key.values.assign(element_count, Bigint(0));

  if (y_i != 0) {
    for (std::size_t eps = 0; eps < element_count; ++eps)
      key.values[eps] = derive_randomness(kp.s, round, eps, aux) * y_i;
  }
  for (std::uint32_t j = 1; j <= all_pks.size(); ++j) {
    if (j == kp.client_index) continue;
    const Bigint shared = powmod(all_pks[j - 1], kp.s, params.N_squared);
    const int sign = (j < kp.client_index) ? 1 : -1;
    for (std::size_t eps = 0; eps < element_count; ++eps) {
      const Bigint phi = h1_pair_mask(shared, round, eps, aux);
      if (sign > 0)
        key.values[eps] += phi;
      else
        key.values[eps] -= phi;
    }
  }
  return key;
}

inline std::vector<Bigint> funkey_agg(std::span<const PartialAggKey> partials) {
  if (partials.empty()) throw std::invalid_argument("funkey_agg: no partial keys");
  const std::size_t len = partials.front().values.size();
  const std::uint64_t round = partials.front().round;
  std::vector<Bigint> skf(len, Bigint(0));
  for (const auto& part : partials) {
    if (part.round != round) throw std::invalid_argument("funkey_agg: mismatched rounds");
    if (part.values.size() != len) throw std::invalid_argument("funkey_agg: mismatched lengths");
    for (std::size_t eps = 0; eps < len; ++eps) skf[eps] += part.values[eps];
  }
  return skf;
}

// Decryptor side: CT = (prod ct_i^{y_i}) * g^{-skf} mod N^2, then the closed-form
// logarithm and a signed lift. Negative y_i use the modular inverse of ct_i.
inline Bigint agg_dec(const GroupParams& params, const Bigint& skf, std::span<const Ciphertext> cts,
                      std::span<const std::int64_t> y) {
  if (cts.size() != y.size()) throw std::invalid_argument("agg_dec: ciphertext/key length mismatch");
  Bigint acc = 1;
  for (std::size_t i = 0; i < cts.size(); ++i) {
    if (y[i] == 0) continue;
    acc = mod_floor(acc * powmod(cts[i].value, Bigint(y[i]), params.N_squared), params.N_squared);
  }
  acc = mod_floor(acc * powmod(params.g, -skf, params.N_squared), params.N_squared);
  return centered_lift(paillier_log(acc, params), params);
}

inline Bigint usr_dec(const Bigint& noised_result, std::span<const Bigint> noise_list,
                      std::span<const std::int64_t> y) {
  if (noise_list.size() != y.size())
    throw std::invalid_argument("usr_dec: noise list/key length mismatch");
  Bigint out = noised_result;
  for (std::size_t i = 0; i < noise_list.size(); ++i) out -= noise_list[i] * y[i];
  return out;
}

}  // namespace srfed
