#include "jini/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace jini {

namespace detail {

namespace {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi,
                    std::uint32_t* lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  *hi = static_cast<std::uint32_t>(p >> 32);
  *lo = static_cast<std::uint32_t>(p);
}

constexpr std::uint32_t kMult0 = 0xD2511F53u;
constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace

void philox4x32(const std::uint32_t ctr[4], const std::uint32_t key[2],
                std::uint32_t out[4]) {
  std::uint32_t x0 = ctr[0], x1 = ctr[1], x2 = ctr[2], x3 = ctr[3];
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMult0, x0, &hi0, &lo0);
    mulhilo(kMult1, x2, &hi1, &lo1);
    const std::uint32_t y0 = hi1 ^ x1 ^ k0;
    const std::uint32_t y1 = lo1;
    const std::uint32_t y2 = hi0 ^ x3 ^ k1;
    const std::uint32_t y3 = lo0;
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  out[0] = x0;
  out[1] = x1;
  out[2] = x2;
  out[3] = x3;
}

}  // namespace detail

std::uint64_t RngStream::next_u64() {
  if (buf_left_ == 0) {
    const std::uint32_t ctr[4] = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u};
    const std::uint32_t key[2] = {static_cast<std::uint32_t>(key_),
                                  static_cast<std::uint32_t>(key_ >> 32)};
    std::uint32_t out[4];
    detail::philox4x32(ctr, key, out);
    buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    buf_left_ = 2;
    ++counter_;
  }
  return buf_[2 - buf_left_--];
}

double RngStream::normal() {
  const double u1 = uniform_pos();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(6.28318530717958647693 * u2);
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::domain_error("gamma: shape must be positive");
  }
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a+1) * U^{1/a}
    const double g = gamma(shape + 1.0);
    return g * std::pow(uniform_pos(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_pos();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::beta(double a, double b) {
  const double ga = gamma(a);
  const double gb = gamma(b);
  const double s = ga + gb;
  double r = (s > 0.0) ? ga / s : 0.5;
  // keep draws strictly inside (0,1) so downstream logs stay finite
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  if (r < lo) r = lo;
  if (r > hi) r = hi;
  return r;
}

}  // namespace jini
