#pragma once

#include <array>
#include <cstdint>

namespace cosub {

// Seedable generator with explicit substreams. The base generator is
// xoshiro256++ (period 2^256 - 1); state is derived from (seed, stream_id)
// through a splitmix64 chain, so identical (seed, stream_id) pairs reproduce
// bit-identical draw sequences and distinct stream ids give independent
// streams. Substreams are derived per (sweep, step, unit) inside the sampler
// so results do not depend on loop scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  // Derives an independent stream keyed by up to three indices.
  RngStream derived(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const;

  std::uint64_t next_u64();

  double uniform();      // [0, 1)
  double uniform_pos();  // (0, 1)
  double exponential();  // rate 1
  double gaussian();     // standard normal

 private:
  RngStream() = default;

  std::array<std::uint64_t, 4> state_{};
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
};

}  // namespace cosub
