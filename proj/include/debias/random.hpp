#pragma once

#include <cstdint>
#include <random>

namespace debias {

/// Identifies one logical random stream. Streams are derived by hashing, so
/// any (purpose, replicate, draw, salt) tuple maps to an independent sequence
/// and draws never depend on which other streams were consumed first.
struct StreamId {
  std::uint64_t purpose = 0;    // which part of a pipeline is drawing
  std::uint64_t replicate = 0;  // simulation replicate / split index
  std::uint64_t draw = 0;       // bootstrap replicate / Monte Carlo draw index
  std::uint64_t salt = 0;       // retry counter for redraws
};

/// Master seed plus stream coordinates. Equal plans yield bit-identical
/// sequences regardless of execution order or thread count.
struct SeedPlan {
  std::uint64_t master_seed = 0;
  StreamId id;

  SeedPlan purpose(std::uint64_t p) const {
    SeedPlan out = *this;
    out.id.purpose = p;
    return out;
  }
  SeedPlan replicate(std::uint64_t r) const {
    SeedPlan out = *this;
    out.id.replicate = r;
    return out;
  }
  SeedPlan draw(std::uint64_t d) const {
    SeedPlan out = *this;
    out.id.draw = d;
    return out;
  }
  SeedPlan salt(std::uint64_t s) const {
    SeedPlan out = *this;
    out.id.salt = s;
    return out;
  }

  std::uint64_t stream_seed() const;
};

/// Deterministic per-stream generator. Distributions are implemented here
/// (not via <random> distribution adaptors) so that sequences are identical
/// across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(const SeedPlan& plan);

  /// Uniform double in (0, 1].
  double uniform01();

  /// Standard normal via Box-Muller (pairs cached).
  double normal();

  /// Gamma(shape, 1) for shape >= 1 (Marsaglia-Tsang).
  double gamma(double shape);

  /// Chi-square with df > 2.
  double chi_square(double df);

  /// Uniform integer in [0, n), rejection-sampled (no modulo bias).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace debias
