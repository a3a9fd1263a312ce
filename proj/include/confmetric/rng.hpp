#pragma once

#include <cstdint>

namespace confmetric {

/// Small counter-based generator (splitmix64 core). Deterministic across
/// platforms, cheap to split into independent streams; every report embeds
/// its seed so runs are reproducible byte for byte.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Independent child stream derived from this seed and a stream id.
    Rng split(std::uint64_t stream) const {
        Rng mix(state_ ^ (0x94d049bb133111ebULL * (stream + 1)));
        mix.next_u64();
        return Rng(mix.next_u64());
    }

  private:
    std::uint64_t state_;
};

}  // namespace confmetric
