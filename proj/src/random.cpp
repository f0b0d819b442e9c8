#include "debias/random.hpp"

#include <cmath>
#include <limits>

#include "debias/errors.hpp"

namespace debias {

namespace {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SeedPlan::stream_seed() const {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ id.purpose);
  h = mix64(h ^ id.replicate);
  h = mix64(h ^ id.draw);
  h = mix64(h ^ id.salt);
  return h;
}

RandomStream::RandomStream(const SeedPlan& plan) : engine_(plan.stream_seed()) {}

double RandomStream::uniform01() {
  // 53-bit mantissa, shifted into (0, 1]
  return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double RandomStream::gamma(double shape) {
  if (shape < 1.0) throw InvalidArgument("gamma sampling requires shape >= 1");
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::chi_square(double df) {
  if (df <= 2.0) throw InvalidDf("chi-square sampling requires df > 2");
  return 2.0 * gamma(0.5 * df);
}

std::uint64_t RandomStream::below(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("below(0)");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace debias
