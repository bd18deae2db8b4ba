#pragma once

#include <array>
#include <cstdint>

namespace tpsim::stat {

/// Mixes two 64-bit identifiers into one (splitmix64 finalizer over the
/// combination). Used to derive stream ids from coordinates such as
/// (scenario, replicate, copy, step).
std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b);

// Counter-seeded xoshiro256++ stream. A given (seed, stream_id) pair
// reproduces the same draw sequence regardless of thread count or the
// order in which streams are created; distinct stream_ids give
// statistically independent sequences. All distribution draws are
// computed from explicit arithmetic on the raw uniforms, so sequences
// do not depend on the standard library's distribution implementations.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  /// Independent child stream with stream_id = mix_ids(stream_id, tag).
  RngStream derive(std::uint64_t tag) const;

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0, 1).
  double uniform();

  /// Standard normal via the polar method (sqrt/log only).
  double normal();

  /// Chi-square draw with integer degrees of freedom df >= 1. Uses the
  /// sum of squared normals for df <= 100 and a gamma generator above.
  double chi_square(int df);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  double gamma_draw(double shape);  // scale 1, shape >= 1

  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::array<std::uint64_t, 4> state_{};
  double spare_normal_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace tpsim::stat
