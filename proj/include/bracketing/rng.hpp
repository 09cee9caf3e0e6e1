#pragma once

#include <cstdint>

namespace bracketing {

// Counter-based generator: output n of stream s is a keyed SplitMix64 finalizer of (seed, s, n),
// so any (seed, stream, index) is reachable without generating the prefix.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next() { return at(counter_++); }
    std::uint64_t at(std::uint64_t index) const;
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on (0, 1].
    double uniform_open0();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // Standard normal via Box-Muller (consumes two outputs, no cached spare).
    double normal();

    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace bracketing
