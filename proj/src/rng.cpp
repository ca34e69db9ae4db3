#include "cosub/rng.hpp"

#include <cmath>

namespace cosub {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

inline std::uint64_t mix_id(std::uint64_t id, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t x = id;
  splitmix64(x);
  x ^= a;
  splitmix64(x);
  x ^= b;
  splitmix64(x);
  x ^= c;
  return splitmix64(x);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t x = seed ^ rotl(stream_id, 17) ^ 0x6a09e667f3bcc908ULL;
  splitmix64(x);
  x ^= stream_id;
  for (auto& word : state_) word = splitmix64(x);
  // xoshiro must not start from the all-zero state.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

RngStream RngStream::derived(std::uint64_t a, std::uint64_t b, std::uint64_t c) const {
  return RngStream(seed_, mix_id(stream_id_, a, b, c));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double RngStream::exponential() { return -std::log(uniform_pos()); }

double RngStream::gaussian() {
  // Box-Muller; the paired draw is discarded so consumption per call is fixed.
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace cosub
