#include "tpsim/stat/rng.hpp"

#include <cmath>

namespace tpsim::stat {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

std::uint64_t mix_ids(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a ^ rotl(b, 17) ^ 0xd6e8feb86659fd93ULL;
  return splitmix64(x);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t s = mix_ids(seed, stream_id);
  for (auto& word : state_) word = splitmix64(s);
}

RngStream RngStream::derive(std::uint64_t tag) const {
  return RngStream(seed_, mix_ids(stream_id_, tag));
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

double RngStream::uniform() {
  // 53-bit mantissa shifted to bin centers, so 0 and 1 are unreachable.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  have_spare_ = true;
  return u * f;
}

double RngStream::chi_square(int df) {
  if (df <= 100) {
    double sum = 0.0;
    for (int i = 0; i < df; ++i) {
      const double z = normal();
      sum += z * z;
    }
    return sum;
  }
  return 2.0 * gamma_draw(0.5 * df);
}

double RngStream::gamma_draw(double shape) {
  // Marsaglia-Tsang squeeze; shape >= 1 in all call paths (df > 100).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace tpsim::stat
