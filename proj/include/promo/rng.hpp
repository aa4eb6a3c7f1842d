#ifndef PROMO_RNG_HPP
#define PROMO_RNG_HPP

#include <cstdint>
#include <random>

namespace promo {

/// Random stream used by every simulation. Uniform draws are built from the
/// raw 64-bit output so the sequence does not depend on the standard
/// library's distribution implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(mix(seed)) {}

    /// Substream `index` of the master seed; independent of thread layout.
    static Rng substream(std::uint64_t master, std::uint64_t index, std::uint64_t tag = 0) {
        std::seed_seq seq{lo(master), hi(master), lo(index), hi(index), lo(tag), hi(tag)};
        Rng g;
        g.engine_.seed(seq);
        return g;
    }

    /// Uniform on [0, 1).
    double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n) { return std::uint64_t(uniform() * double(n)); }

private:
    static std::uint32_t lo(std::uint64_t v) { return std::uint32_t(v & 0xffffffffu); }
    static std::uint32_t hi(std::uint64_t v) { return std::uint32_t(v >> 32); }
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

} // namespace promo

#endif // PROMO_RNG_HPP
