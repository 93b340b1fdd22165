#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Core>

namespace safe_rl {

using Rng = std::mt19937_64;

// FNV-1a; stable across platforms, unlike std::hash.
constexpr std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// A master seed fans out to independent named streams: drawing from one
// never shifts another.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master) : master_(master) {}

  std::uint64_t seed(std::string_view name, std::uint64_t index = 0) const {
    return mix_seed(mix_seed(master_, stable_hash(name)), index);
  }
  Rng stream(std::string_view name, std::uint64_t index = 0) const {
    return Rng(seed(name, index));
  }
  std::uint64_t master() const { return master_; }

 private:
  std::uint64_t master_;
};

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Eigen::VectorXd gaussian_vector(Rng& rng, Eigen::Index n, double stddev = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = stddev * gaussian(rng);
  return v;
}

}  // namespace safe_rl
