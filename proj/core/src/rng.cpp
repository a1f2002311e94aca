#include "levymix/rng.hpp"

#include <cmath>
#include <numbers>

namespace levymix {

namespace {

// splitmix64 finalizer; full-period bit mixer.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t replicate, StreamRole role) {
  // Key-derived state: distinct (replicate, role) pairs land on unrelated
  // points of the xoshiro256++ state space.
  std::uint64_t key = mix64(master_seed);
  key = mix64(key ^ mix64(replicate ^ 0x7c15d3b2a9e38f01ULL));
  key = mix64(key ^ mix64(static_cast<std::uint64_t>(role) ^ 0x2545f4914f6cdd1dULL));
  for (auto& s : state_) {
    key = mix64(key);
    s = key;
  }
  // An all-zero state is the one forbidden xoshiro seed.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  // xoshiro256++
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

double RngStream::uniform01() {
  // 53-bit mantissa, offset by half an ulp so 0 and 1 are never returned.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform01()));
  const double phi = 2.0 * std::numbers::pi * uniform01();
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

double RngStream::exponential() { return -std::log(uniform01()); }

}  // namespace levymix
