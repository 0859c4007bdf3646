#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srfed/bigint.hpp"

namespace srfed {

// Context tags keep the three uses of the keyed hash in disjoint domains.
enum class HashDomain : unsigned char {
  kRandomness = 0x01,  // per-(round, element) encryption randomness r
  kPairMask = 0x02,    // pairwise masks phi from DH shared secrets
  kNoiseChain = 0x03,  // noise chain advance and eta selection
};

// Incremental builder for a length-prefixed argument encoding fed to SHA-256.
class HashInput {
 public:
  explicit HashInput(HashDomain domain) { buf_.push_back(static_cast<unsigned char>(domain)); }

  HashInput& add(const Bigint& z) {
    auto mag = to_bytes(z);
    tag('Z');
    buf_.push_back(sgn(z) < 0 ? 1 : 0);
    len32(mag.size());
    buf_.insert(buf_.end(), mag.begin(), mag.end());
    return *this;
  }

  HashInput& add(std::uint64_t v) {
    tag('U');
    for (int i = 7; i >= 0; --i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    return *this;
  }

  HashInput& add(std::string_view s) {
    tag('S');
    len32(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
    return *this;
  }

  std::array<unsigned char, 32> digest() const {
    std::array<unsigned char, 32> out{};
    unsigned int out_len = 0;
    if (EVP_Digest(buf_.data(), buf_.size(), out.data(), &out_len, EVP_sha256(), nullptr) != 1 ||
        out_len != out.size())
      throw std::runtime_error("sha256 digest failed");
    return out;
  }

  // Digest as a non-negative integer in [0, 2^256).
  Bigint digest_int() const {
    auto d = digest();
    return from_bytes(d.data(), d.size());
  }

 private:
  void tag(char c) { buf_.push_back(static_cast<unsigned char>(c)); }
  void len32(std::size_t n) {
    for (int i = 3; i >= 0; --i) buf_.push_back(static_cast<unsigned char>(n >> (8 * i)));
  }
  std::vector<unsigned char> buf_;
};

// H1 for encryption randomness: r = H1(sk, round, element, aux).
inline Bigint h1_randomness(const Bigint& sk, std::uint64_t round, std::uint64_t element,
                            std::string_view aux = {}) {
  return HashInput(HashDomain::kRandomness).add(sk).add(round).add(element).add(aux).digest_int();
}

// H1 for pairwise masks: phi^{i,j} = H1(g^{s_i s_j}, round, element, aux).
inline Bigint h1_pair_mask(const Bigint& shared_secret, std::uint64_t round, std::uint64_t element,
                           std::string_view aux = {}) {
  return HashInput(HashDomain::kPairMask).add(shared_secret).add(round).add(element).add(aux).digest_int();
}

// H1 for the noise recursion: eta_t = H1(eta_{t-1}, pk, ctr) reduced by the caller.
inline Bigint h1_noise(const Bigint& prev, const Bigint& pk, std::uint64_t ctr) {
  return HashInput(HashDomain::kNoiseChain).add(prev).add(pk).add(ctr).digest_int();
}

}  // namespace srfed
