#pragma once

#include <cstdint>
#include <random>

namespace jive {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);

/// A tree of reproducible random streams derived from one master seed.
/// Each replicate gets its own engine, so results do not depend on the
/// order in which replicates are evaluated.
class RandomStreams {
 public:
  explicit RandomStreams(std::uint64_t seed) : key_(mix_seed(seed)) {}

  RandomStreams substream(std::uint64_t id) const {
    return RandomStreams(Raw{mix_seed(key_ ^ mix_seed(id + 0x9e3779b97f4a7c15ULL))});
  }

  Engine engine(std::uint64_t replicate) const {
    const std::uint64_t s = mix_seed(key_ + 0xd1b54a32d192ed03ULL * (replicate + 1));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
    return Engine(seq);
  }

  std::uint64_t key() const { return key_; }

 private:
  struct Raw {
    std::uint64_t key;
  };
  explicit RandomStreams(Raw raw) : key_(raw.key) {}

  std::uint64_t key_;
};

inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace jive
