#include "pathlab/sde/rng.hpp"

#include <cmath>
#include <numbers>

namespace pathlab::sde {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

// Uniform on the open interval (0,1) from 64 random bits.
inline double open_uniform(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::apply(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kM0, c[0], lo0, hi0);
    mulhilo(kM1, c[2], lo1, hi1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

NormalStream::NormalStream(std::uint64_t master_seed, std::uint64_t path_index) {
  const std::uint64_t k = splitmix64(master_seed);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  path_lo_ = static_cast<std::uint32_t>(path_index);
  path_hi_ = static_cast<std::uint32_t>(path_index >> 32);
}

void NormalStream::step_normals(std::uint32_t step, int count, double* out) const {
  // One Philox block gives two uniforms, hence two Box-Muller normals.
  for (int lane = 0; 2 * lane < count; ++lane) {
    const auto r = Philox4x32::apply({step, static_cast<std::uint32_t>(lane), path_lo_, path_hi_}, key_);
    const double u1 = open_uniform(r[0], r[1]);
    const double u2 = open_uniform(r[2], r[3]);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    out[2 * lane] = rad * std::cos(ang);
    if (2 * lane + 1 < count) out[2 * lane + 1] = rad * std::sin(ang);
  }
}

}  // namespace pathlab::sde
