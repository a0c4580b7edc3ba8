#pragma once

#include <cstdint>

namespace grasp {

/**
 * Counter-based random stream: the i-th draw is a pure function of
 * (seed, stream, i), so any sample can be produced without generating the
 * ones before it. Parallel loops index draws by iteration number and stay
 * reproducible under any scheduling. Child streams come from split(); they
 * are hash-derived, so distinct (seed, stream) pairs give unrelated
 * sequences for any practical number of streams.
 *
 * The word function is the splitmix64 finalizer applied to an offset
 * counter sequence, which passes BigCrush in its sequential form.
 */
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0);

  // Derived stream for a named sub-purpose (one level is enough here;
  // split of a split keeps mixing).
  RandomStream split(std::uint64_t substream) const;

  std::uint64_t bits(std::uint64_t i) const;

  // Uniform on [0, 1), 53-bit resolution.
  double uniform(std::uint64_t i) const;

  // Uniform on [lo, hi).
  double uniform(std::uint64_t i, double lo, double hi) const;

private:
  RandomStream() = default;
  std::uint64_t base_ = 0;
};

}  // namespace grasp
