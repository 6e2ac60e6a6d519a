#include "jumpsde/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace jumpsde {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                      std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         const std::array<std::uint32_t, 2>& key) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mul_hi_lo(kPhiloxM0, ctr[0], lo0, hi0);
  mul_hi_lo(kPhiloxM1, ctr[2], lo1, hi1);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline std::array<std::uint32_t, 4> philox10(std::array<std::uint32_t, 4> ctr,
                                             std::array<std::uint32_t, 2> key) {
  for (int round = 0;; ++round) {
    philox_round(ctr, key);
    if (round == 9) break;
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

}  // namespace

const char* to_string(StreamRole role) {
  switch (role) {
    case StreamRole::Noise0:
      return "noise0";
    case StreamRole::Noise1:
      return "noise1";
    case StreamRole::Auxiliary:
      return "auxiliary";
  }
  return "unknown";
}

SeedSpec derive_seed(std::uint64_t master_seed, std::uint64_t replicate_id,
                     StreamRole role) {
  if (replicate_id >= (std::uint64_t{1} << 56)) {
    throw std::invalid_argument("derive_seed: replicate_id exceeds 2^56");
  }
  return SeedSpec{master_seed, replicate_id, role};
}

PhiloxRng::PhiloxRng(const SeedSpec& seed) : seed_(seed) {
  if (seed.replicate_id >= (std::uint64_t{1} << 56)) {
    throw std::invalid_argument("PhiloxRng: replicate_id exceeds 2^56");
  }
  key_ = {static_cast<std::uint32_t>(seed.master_seed),
          static_cast<std::uint32_t>(seed.master_seed >> 32)};
  base_counter_ = {0u, 0u, static_cast<std::uint32_t>(seed.replicate_id),
                   static_cast<std::uint32_t>((seed.replicate_id >> 32) & 0x00FFFFFFu) |
                       (static_cast<std::uint32_t>(seed.stream_role) << 24)};
}

void PhiloxRng::refill() {
  std::array<std::uint32_t, 4> ctr = base_counter_;
  ctr[0] = static_cast<std::uint32_t>(block_);
  ctr[1] = static_cast<std::uint32_t>(block_ >> 32);
  buffer_ = philox10(ctr, key_);
  ++block_;
  buffer_pos_ = 0;
}

std::uint32_t PhiloxRng::next_u32() {
  if (buffer_pos_ >= 4) refill();
  return buffer_[buffer_pos_++];
}

std::uint64_t PhiloxRng::next_u64() {
  const std::uint64_t lo = next_u32();
  const std::uint64_t hi = next_u32();
  return (hi << 32) | lo;
}

double PhiloxRng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PhiloxRng::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

std::uint64_t PhiloxRng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("poisson: mean must be finite and non-negative");
  }
  std::uint64_t total = 0;
  double remaining = mean;
  while (remaining > 0.0) {
    const double chunk = remaining > 500.0 ? 500.0 : remaining;
    remaining -= chunk;
    const double limit = std::exp(-chunk);
    std::uint64_t count = 0;
    double prod = 1.0;
    do {
      prod *= next_double();
      ++count;
    } while (prod > limit);
    total += count - 1;
  }
  return total;
}

double PhiloxRng::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("exponential: rate must be finite and positive");
  }
  // 1 - U avoids log(0).
  return -std::log1p(-next_double()) / rate;
}

}  // namespace jumpsde
