#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "srfed/bigint.hpp"

namespace srfed {

// Deterministic map between real model parameters and the bounded signed
// integers the encryption layer works on. scale is a power of two; rounding is
// half-to-even.
class FixedPointCodec {
 public:
  FixedPointCodec(unsigned scale_bits, const Bigint& max_message)
      : scale_bits_(scale_bits), scale_(std::int64_t{1} << scale_bits) {
    if (scale_bits == 0 || scale_bits > 40)
      throw std::invalid_argument("FixedPointCodec: scale_bits out of range");
    Bigint cap = max_message - 1;
    Bigint hard_cap = Bigint(1) << 60;
    if (cap > hard_cap) cap = hard_cap;
    if (cap < scale_) throw std::invalid_argument("FixedPointCodec: message bound below scale");
    max_abs_ = cap.get_si();
  }

  std::int64_t scale() const { return scale_; }
  unsigned scale_bits() const { return scale_bits_; }
  std::int64_t max_abs() const { return max_abs_; }
  std::uint64_t clip_count() const { return clips_.load(std::memory_order_relaxed); }

  std::int64_t encode(double f) const {
    const double scaled = f * static_cast<double>(scale_);
    if (!std::isfinite(scaled) || std::fabs(scaled) >= static_cast<double>(max_abs_) + 0.5)
      throw std::domain_error("FixedPointCodec::encode: value out of representable range");
    return std::llrint(scaled);  // default FP mode: round half to even
  }

  // Saturating variant used on the model path, where attack noise may exceed
  // the representable range; every clip is counted.
  std::int64_t encode_clip(double f) const {
    const double scaled = f * static_cast<double>(scale_);
    if (!std::isfinite(scaled) || std::fabs(scaled) >= static_cast<double>(max_abs_) + 0.5) {
      clips_.fetch_add(1, std::memory_order_relaxed);
      return std::signbit(scaled) ? -max_abs_ : max_abs_;
    }
    return std::llrint(scaled);
  }

  double decode(std::int64_t v) const { return static_cast<double>(v) / static_cast<double>(scale_); }

  double decode(const Bigint& v) const { return v.get_d() / static_cast<double>(scale_); }

  // Decode of a product of two encoded factors (inner products).
  double decode_product(const Bigint& v) const {
    return v.get_d() / (static_cast<double>(scale_) * static_cast<double>(scale_));
  }

 private:
  unsigned scale_bits_;
  std::int64_t scale_;
  std::int64_t max_abs_;
  mutable std::atomic<std::uint64_t> clips_{0};
};

}  // namespace srfed
