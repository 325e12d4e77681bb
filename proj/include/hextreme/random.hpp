#ifndef HEXTREME_RANDOM_HPP
#define HEXTREME_RANDOM_HPP

#include <cstdint>

namespace hextreme {

/// Counter-based generator: output i of stream (seed, stream) is a pure
/// function of (seed, stream, i), so replicate streams never depend on
/// scheduling. Mixing is the splitmix64 finalizer.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return mix(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace hextreme

#endif  // HEXTREME_RANDOM_HPP
