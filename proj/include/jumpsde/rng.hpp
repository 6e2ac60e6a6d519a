#ifndef JUMPSDE_RNG_HPP
#define JUMPSDE_RNG_HPP

#include <array>
#include <cstdint>
#include <string>

namespace jumpsde {

enum class StreamRole : std::uint32_t { Noise0 = 0, Noise1 = 1, Auxiliary = 2 };

const char* to_string(StreamRole role);

// Identifies one logical random substream. Identical specs reproduce
// identical draws bit for bit; distinct (replicate_id, stream_role) pairs
// select disjoint counter blocks of the generator, so substreams never
// overlap. replicate_id must stay below 2^56.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_id = 0;
  StreamRole stream_role = StreamRole::Noise0;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

SeedSpec derive_seed(std::uint64_t master_seed, std::uint64_t replicate_id,
                     StreamRole role);

// Philox4x32-10 counter generator (Salmon et al., SC 2011).
//
// Key   = the 64-bit master seed.
// Counter layout: words 0-1 hold the running 64-bit block counter, word 2
// the low 32 bits of replicate_id, word 3 packs replicate_id bits 32..55
// with the stream role in the top byte. Each substream therefore owns 2^64
// blocks of four 32-bit words.
class PhiloxRng {
 public:
  explicit PhiloxRng(const SeedSpec& seed);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0,1), 53 random bits.
  double next_double();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Exact Poisson draw for any finite non-negative mean (product-of-uniforms,
  // evaluated in chunks so the acceptance threshold never underflows).
  std::uint64_t poisson(double mean);

  double exponential(double rate);

  const SeedSpec& seed() const { return seed_; }

 private:
  void refill();

  SeedSpec seed_;
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> base_counter_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffer_pos_ = 4;
};

}  // namespace jumpsde

#endif  // JUMPSDE_RNG_HPP
