#pragma once

#include <array>
#include <cstdint>

namespace ruinlab {

// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

// Independent noise channels of one simulated path.
enum class Substream : std::uint32_t {
  Returns = 0,
  Business = 1,
  Representation = 2,
};

// A stream of uniforms addressed by (seed, stream index, substream).
// Distinct addresses give independent sequences; the same address replays
// the same sequence bit for bit. The block counter is 32 bits wide and the
// stream throws Error{RngExhausted} instead of wrapping.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index, Substream substream) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return index_; }
  Substream substream() const noexcept { return substream_; }
  // Number of 128-bit blocks consumed so far.
  std::uint64_t counter() const noexcept { return block_; }

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform();
  double normal();
  double exponential();  // rate 1

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t index_;
  Substream substream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace ruinlab
