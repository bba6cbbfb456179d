#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace segsamp {

// Purpose tags keep streams for different uses of one seed apart.
enum class Purpose : std::uint64_t {
  Draws = 1,
  Pairing = 2,
  Replication = 3,
  Permutation = 4,
  Coupling = 5,
  Acceptance = 6,
  Data = 7,
  Timing = 8,
};

// mt19937_64 keyed by (seed, stream, purpose, substream) through seed_seq.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0,
               Purpose purpose = Purpose::Draws, std::uint64_t substream = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  // Uniform on the open interval (0,1), 53 random bits.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }
  // Integer in [0, n).
  std::size_t below(std::size_t n);
  // Uniform random permutation of 0..n-1 (Fisher-Yates).
  void permutation(std::vector<int>& out, int n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace segsamp
