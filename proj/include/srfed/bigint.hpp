#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace srfed {

// Arbitrary-precision signed integer. Value semantics, heap-backed.
using Bigint = mpz_class;

inline Bigint powmod(const Bigint& base, const Bigint& exp, const Bigint& mod) {
  Bigint r;
  // mpz_powm accepts negative exponents when base is invertible mod `mod`.
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), mod.get_mpz_t());
  return r;
}

inline Bigint invmod(const Bigint& a, const Bigint& mod) {
  Bigint r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0)
    throw std::domain_error("invmod: element not invertible");
  return r;
}

// Canonical representative in [0, mod).
inline Bigint mod_floor(const Bigint& a, const Bigint& mod) {
  Bigint r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t());
  return r;
}

inline std::size_t bit_length(const Bigint& a) {
  if (a == 0) return 0;
  return mpz_sizeinbase(a.get_mpz_t(), 2);
}

inline std::string to_hex(const Bigint& a) { return a.get_str(16); }

inline Bigint from_hex(const std::string& s) {
  Bigint a;
  if (a.set_str(s, 16) != 0) throw std::invalid_argument("from_hex: bad hex integer: " + s);
  return a;
}

// Magnitude bytes, most significant first. Empty for zero.
inline std::vector<unsigned char> to_bytes(const Bigint& a) {
  std::vector<unsigned char> out;
  const std::size_t bits = bit_length(a);
  if (bits == 0) return out;
  out.resize((bits + 7) / 8);
  std::size_t written = 0;
  mpz_export(out.data(), &written, 1, 1, 1, 0, a.get_mpz_t());
  out.resize(written);
  return out;
}

inline Bigint from_bytes(const unsigned char* data, std::size_t len) {
  Bigint a;
  mpz_import(a.get_mpz_t(), len, 1, 1, 1, 0, data);
  return a;
}

// Deterministic seeded source for big-integer sampling (GMP Mersenne Twister).
class CryptoRng {
 public:
  explicit CryptoRng(std::uint64_t seed) {
    gmp_randinit_mt(state_);
    Bigint s;
    mpz_import(s.get_mpz_t(), 1, 1, sizeof(seed), 1, 0, &seed);
    gmp_randseed(state_, s.get_mpz_t());
  }
  ~CryptoRng() { gmp_randclear(state_); }
  CryptoRng(const CryptoRng&) = delete;
  CryptoRng& operator=(const CryptoRng&) = delete;

  // Uniform in [0, 2^bits).
  Bigint uniform_bits(std::size_t bits) {
    Bigint r;
    mpz_urandomb(r.get_mpz_t(), state_, bits);
    return r;
  }

  // Uniform in [0, n).
  Bigint uniform_below(const Bigint& n) {
    Bigint r;
    mpz_urandomm(r.get_mpz_t(), state_, n.get_mpz_t());
    return r;
  }

 private:
  gmp_randstate_t state_;
};

}  // namespace srfed
