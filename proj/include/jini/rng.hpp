#pragma once

#include <cstdint>
#include <vector>

namespace jini {

namespace detail {

// SplitMix64 finalizer; used to hash (seed, path-label) chains into stream
// keys.  Distinct paths map to (statistically) independent keys.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t combine(std::uint64_t key, std::uint64_t label) {
  return mix64(mix64(key) ^ mix64(label + 0xD1B54A32D192ED03ULL));
}

// Philox4x32-10 block function (counter-based, keyed permutation).
void philox4x32(const std::uint32_t ctr[4], const std::uint32_t key[2],
                std::uint32_t out[4]);

}  // namespace detail

// Deterministic random stream addressed by (base_seed, path of labels).
// Draws come from the Philox4x32-10 counter-based generator keyed by a hash
// of the path, so any stream can be reconstructed independently of draw
// order elsewhere, and child streams never overlap their parents.
class RngStream {
 public:
  explicit RngStream(std::uint64_t base_seed)
      : key_(detail::combine(base_seed, 0x243F6A8885A308D3ULL)) {}

  // Sub-stream for the given label; derivation is pure (no state consumed).
  RngStream child(std::uint64_t label) const {
    return RngStream(detail::combine(key_, label), 0);
  }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe under log().
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (two uniforms per draw, cosine branch).
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang squeeze; boost for shape < 1.
  double gamma(double shape);

  // Beta(a, b) as the usual gamma ratio, clamped into the open interval.
  double beta(double a, double b);

 private:
  RngStream(std::uint64_t key, int) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::uint64_t buf_[2] = {0, 0};
  int buf_left_ = 0;
};

}  // namespace jini
