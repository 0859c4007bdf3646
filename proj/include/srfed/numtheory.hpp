#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>

#include "srfed/bigint.hpp"

namespace srfed {

inline constexpr int kPrimalityRounds = 40;

// Production-security default for the composite modulus; tests and desk-scale
// experiments pass explicit smaller sizes.
inline constexpr unsigned kProductionGroupBits = 2048;

inline bool is_probable_prime(const Bigint& n) {
  return mpz_probab_prime_p(n.get_mpz_t(), kPrimalityRounds) > 0;
}

// Safe prime p = 2p' + 1 with exactly `bits` bits, both p and p' probable
// primes. Throws after a bounded candidate count so a caller can retry with a
// fresh seed.
inline Bigint generate_safe_prime(unsigned bits, CryptoRng& rng) {
  if (bits < 2) throw std::invalid_argument("generate_safe_prime: bits must be >= 2");
  const Bigint low = Bigint(1) << (bits - 2);  // p' range [2^(bits-2), 2^(bits-1))
  const std::uint64_t max_attempts = 4096ull + 64ull * bits * bits;
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    Bigint p_half = low + rng.uniform_below(low);
    if (p_half > 2 && mpz_even_p(p_half.get_mpz_t())) p_half |= 1;
    if (!is_probable_prime(p_half)) continue;
    Bigint p = 2 * p_half + 1;
    if (is_probable_prime(p)) return p;
  }
  throw std::runtime_error("generate_safe_prime: candidate search exhausted, retry with a new seed");
}

// Public parameters of the (2N)-th residue subgroup of Z*_{N^2}.
struct GroupParams {
  Bigint N;
  Bigint N_squared;
  Bigint g;
  unsigned bit_length = 0;

  bool in_group(const Bigint& x) const {
    if (x <= 0 || x >= N_squared) return false;
    Bigint d;
    mpz_gcd(d.get_mpz_t(), x.get_mpz_t(), N.get_mpz_t());
    return d == 1;
  }
};

struct GroupWithFactors {
  GroupParams params;
  Bigint p;
  Bigint q;
  Bigint p_half;  // p'
  Bigint q_half;  // q'
};

// Builds the group from given safe primes. Used by setup_group and by tests
// that pin tiny moduli.
inline GroupWithFactors make_group_from_primes(const Bigint& p, const Bigint& q, CryptoRng& rng) {
  if (p == q) throw std::invalid_argument("make_group_from_primes: p and q must differ");
  GroupWithFactors out;
  out.p = p;
  out.q = q;
  out.p_half = (p - 1) / 2;
  out.q_half = (q - 1) / 2;
  GroupParams& pp = out.params;
  pp.N = p * q;
  pp.N_squared = pp.N * pp.N;
  pp.bit_length = static_cast<unsigned>(bit_length(pp.N));

  const Bigint subgroup_order = out.p_half * out.q_half;
  for (int tries = 0; tries < 1000; ++tries) {
    Bigint g_prime = 2 + rng.uniform_below(pp.N_squared - 2);
    Bigint d;
    mpz_gcd(d.get_mpz_t(), g_prime.get_mpz_t(), pp.N.get_mpz_t());
    if (d != 1) continue;
    Bigint g = powmod(g_prime, 2 * pp.N, pp.N_squared);
    if (g == 1) continue;  // degenerate generator, resample
    if (powmod(g, subgroup_order, pp.N_squared) != 1)
      throw std::logic_error("make_group_from_primes: inputs are not safe primes");
    if (powmod(g, pp.N, pp.N_squared) == 1) continue;  // g must not live in the (1+N)-subgroup
    pp.g = g;
    return out;
  }
  throw std::runtime_error("make_group_from_primes: could not find a generator");
}

inline GroupWithFactors setup_group_keep_factors(unsigned bits, CryptoRng& rng) {
  if (bits < 16) throw std::invalid_argument("setup_group: bits must be >= 16");
  const unsigned p_bits = bits - bits / 2;
  const unsigned q_bits = bits / 2;
  Bigint p = generate_safe_prime(p_bits, rng);
  Bigint q;
  for (int tries = 0;; ++tries) {
    q = generate_safe_prime(q_bits, rng);
    if (q != p) break;
    if (tries > 1000) throw std::runtime_error("setup_group: cannot find distinct safe primes");
  }
  return make_group_from_primes(p, q, rng);
}

inline GroupParams setup_group(unsigned bits, CryptoRng& rng) {
  return setup_group_keep_factors(bits, rng).params;
}

// Closed-form logarithm base (1+N): ct = (1+N)^m mod N^2  ->  m.
// No search loop; cost is independent of m.
inline Bigint paillier_log(const Bigint& ct, const GroupParams& params) {
  Bigint v = mod_floor(ct - 1, params.N_squared);
  Bigint q, r;
  mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), v.get_mpz_t(), params.N.get_mpz_t());
  if (r != 0)
    throw std::domain_error("paillier_log: value outside the (1+N)-generated subgroup");
  return q;
}

// Signed decode of a residue in [0, N): result in (-N/2, N/2].
inline Bigint centered_lift(const Bigint& v, const GroupParams& params) {
  if (v < 0 || v >= params.N) throw std::invalid_argument("centered_lift: input outside [0, N)");
  if (2 * v <= params.N) return v;
  return v - params.N;
}

// Message/key magnitude bounds sized so noised inner products of dimension I
// never wrap modulo N.
struct PlaintextBound {
  Bigint X;  // max message magnitude
  Bigint Y;  // max key-vector magnitude
  Bigint M;  // noise bound, floor(sqrt(N/I)/2)
  Bigint I;  // inner-product dimension / encryptor count

  static PlaintextBound derive(const GroupParams& params, const Bigint& dim) {
    if (dim < 1) throw std::invalid_argument("PlaintextBound: dimension must be >= 1");
    Bigint ratio = params.N / dim;
    Bigint root;
    mpz_sqrt(root.get_mpz_t(), ratio.get_mpz_t());
    PlaintextBound b;
    b.M = root / 2;
    b.I = dim;
    b.X = b.M - 1;
    b.Y = b.M - 1;
    b.validate(params);
    return b;
  }

  void validate(const GroupParams& params) const {
    if (X < 1 || Y < 1 || M < 2)
      throw std::invalid_argument("PlaintextBound: group too small for this dimension");
    if (X * Y >= params.N) throw std::invalid_argument("PlaintextBound: X*Y must be < N");
    if (X >= M || Y >= M) throw std::invalid_argument("PlaintextBound: X and Y must be < M");
    if (2 * I * M * M >= params.N)
      throw std::invalid_argument("PlaintextBound: 2*I*M^2 must be < N");
  }
};

}  // namespace srfed
