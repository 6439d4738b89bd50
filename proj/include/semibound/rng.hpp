#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace semibound {

/**
 * Counter-based random numbers (Philox 4x32-10).
 *
 * Every draw is a pure function of (seed, stream, counter), so path p, step k
 * always sees the same noise regardless of how paths are scheduled across
 * workers.  This is what makes common-random-number estimators and
 * bit-reproducible parallel runs possible.
 */
struct Philox4x32 {
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::uint64_t key,
                                            std::array<std::uint32_t, 4> ctr) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
      const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
      const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ k0, lo1, hi0 ^ ctr[3] ^ k1, lo0};
      k0 += kW0;
      k1 += kW1;
    }
    return ctr;
  }
};

/// One Philox block addressed by (stream, path, step, slot).
inline std::array<std::uint32_t, 4> rng_block(std::uint64_t seed,
                                              std::uint32_t stream,
                                              std::uint64_t path,
                                              std::uint64_t step,
                                              std::uint32_t slot) {
  const std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(path),
      static_cast<std::uint32_t>(path >> 32) ^ stream,
      static_cast<std::uint32_t>(step),
      static_cast<std::uint32_t>(step >> 32) ^ slot};
  return Philox4x32::block(seed, ctr);
}

inline double u64_to_unit(std::uint64_t v) {
  // 53-bit mantissa, value in [0, 1)
  return static_cast<double>(v >> 11) * 0x1.0p-53;
}

/// Uniform in [0,1).
inline double rng_uniform(std::uint64_t seed, std::uint32_t stream,
                          std::uint64_t path, std::uint64_t step,
                          std::uint32_t slot) {
  const auto b = rng_block(seed, stream, path, step, slot);
  const std::uint64_t v =
      (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  return u64_to_unit(v);
}

/// Two independent standard normals from one counter (Box-Muller).
inline void rng_normal_pair(std::uint64_t seed, std::uint32_t stream,
                            std::uint64_t path, std::uint64_t step,
                            std::uint32_t slot, double& z0, double& z1) {
  const auto b = rng_block(seed, stream, path, step, slot);
  const std::uint64_t v0 = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  const std::uint64_t v1 = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
  // u0 in (0,1] so the log is finite
  const double u0 = static_cast<double>((v0 >> 11) + 1) * 0x1.0p-53;
  const double u1 = u64_to_unit(v1);
  const double r = std::sqrt(-2.0 * std::log(u0));
  const double a = 6.283185307179586476925286766559 * u1;
  z0 = r * std::cos(a);
  z1 = r * std::sin(a);
}

/// Fills the normals a d-dimensional step needs, two per Philox block.
inline void rng_normal_vector(std::uint64_t seed, std::uint32_t stream,
                              std::uint64_t path, std::uint64_t step, int dim,
                              double* out) {
  int i = 0;
  std::uint32_t slot = 0;
  while (i + 1 < dim) {
    rng_normal_pair(seed, stream, path, step, slot++, out[i], out[i + 1]);
    i += 2;
  }
  if (i < dim) {
    double spare;
    rng_normal_pair(seed, stream, path, step, slot, out[i], spare);
  }
}

/// Derives an unrelated seed for an auxiliary purpose (splitmix64 step).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace semibound
