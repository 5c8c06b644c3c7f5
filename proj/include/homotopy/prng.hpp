#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include "homotopy/types.hpp"

namespace homotopy {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11), as specified by Random123.
/// A block is a pure function of (counter, key), so streams are reproducible on any platform.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr int kRounds = 10;

  static Counter block(Counter counter, Key key);
};

/// Sequential view over Philox blocks. Key = seed, counter = (block index, stream).
///
/// Algorithm version 1:
///   - 64-bit draws take words (0,1) then (2,3) of each block, low word first;
///   - uniform() = ((x >> 11) + 0.5) * 2^-53, strictly inside (0, 1);
///   - normal() is Box-Muller on two consecutive uniforms, yielding the cosine branch then the
///     sine branch.
class RandomStream {
 public:
  using result_type = std::uint64_t;
  static constexpr int kAlgorithmVersion = 1;

  RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  double uniform();
  double normal();

  /// rows x cols matrix of standard normals, filled row by row.
  Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);
  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  void refill();

  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace homotopy
