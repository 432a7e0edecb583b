#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace triplan {

// Stateless mixer used to derive independent seeds from (base, stream) pairs.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// FNV-1a over raw bytes; used for trajectory/state hashes in logs and tests.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ull);

// Deterministic RNG. The engine (mt19937_64) is fully specified by the
// standard; draw helpers are hand-rolled because std distributions are not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, n). n == 0 is a contract error.
  std::uint64_t below(std::uint64_t n);

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

  // Uniform double in [0, 1).
  double uniform01();

  double uniform(double lo, double hi);

  bool chance(double p) { return uniform01() < p; }

  // Irwin-Hall approximation (sum of 12 uniforms); smooth enough for sensor
  // noise and exactly replayable from the draw count.
  double gaussian(double mean, double sigma);

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(below(v.size()))];
  }

  // Fisher-Yates, descending index; independent of std::shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace triplan
