#include "grasp/rng.hpp"

namespace grasp {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer (Steele, Lea, Flood 2014).
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : base_(mix64(seed + kGolden * mix64(stream + 1))) {}

RandomStream RandomStream::split(std::uint64_t substream) const {
  RandomStream child;
  child.base_ = mix64(base_ + kGolden * mix64(substream + 1));
  return child;
}

std::uint64_t RandomStream::bits(std::uint64_t i) const {
  return mix64(base_ + kGolden * i);
}

double RandomStream::uniform(std::uint64_t i) const {
  return static_cast<double>(bits(i) >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(std::uint64_t i, double lo, double hi) const {
  return lo + (hi - lo) * uniform(i);
}

}  // namespace grasp
