#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace frameflow {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// Pure function of (key, counter); no hidden state.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter hash(Counter ctr, Key key);
};

// Independent streams are addressed by (seed, purpose, index). A path p of an
// ensemble uses index p; purposes separate the simulation from oracle draws so
// that both can share one user seed.
enum class StreamPurpose : std::uint32_t {
  simulation = 1,
  euclidean_oracle = 2,
  hyperbolic_oracle = 3,
  haar = 4,
  ergodic = 5,
  testing = 99,
};

// Uniform random bit generator over one Philox stream. Each counter block
// yields four 32-bit words, consumed in order.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index);
  RandomStream(std::uint64_t seed, std::uint64_t index)
      : RandomStream(seed, StreamPurpose::simulation, index) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();
  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53 bits.
  double uniform();
  // Standard normal via Box-Muller; values are produced in pairs.
  double normal();
  void fill_normal(std::span<double> out);

  std::uint64_t blocks_consumed() const { return block_; }

 private:
  void refill();

  Philox4x32::Key key_{};
  std::uint64_t index_ = 0;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace frameflow
