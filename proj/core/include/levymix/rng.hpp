#pragma once

#include <array>
#include <cstdint>

namespace levymix {

/// Role tag keeping the random streams of one replicate disjoint.
enum class StreamRole : std::uint64_t {
  path = 1,   // driving increments of the observed process
  inner = 2,  // inner Monte Carlo (conditional means, H2 probes)
  limit = 3,  // paths backing the mixed-Gaussian limit sampler
  noise = 4,  // the independent standard normals of the limit
};

/// Deterministic random stream keyed by (master_seed, replicate, role).
///
/// The state is derived by hashing the key, so any worker can recreate the
/// stream for replicate r without coordination; the draw sequence depends
/// only on the key, never on thread count or scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t replicate, StreamRole role);

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0,1).
  double uniform01();

  /// Standard normal via Box-Muller; one spare value is cached.
  double gaussian();

  /// Exponential with unit rate.
  double exponential();

 private:
  std::array<std::uint64_t, 4> state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace levymix
