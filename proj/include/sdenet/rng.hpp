#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace sdenet {

// Deterministic random stream. Distribution objects are created per call so
// that the full stream state is the engine state alone; this is what makes
// checkpoints resume bit-exactly.
class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0);

  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal(); }
  // Uniform on [0,1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double prob) { return uniform() < prob; }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  double gamma(double shape, double scale) {
    return std::gamma_distribution<double>(shape, scale)(engine_);
  }
  // Inverse-Gamma with density b^a/Gamma(a) x^{-a-1} exp(-b/x).
  double inverse_gamma(double shape, double scale) { return 1.0 / gamma(shape, 1.0 / scale); }

  std::string serialize() const;
  void deserialize(const std::string& state);

  std::mt19937_64& engine() { return engine_; }

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sdenet
