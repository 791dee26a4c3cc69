#ifndef SPOC_RANDOM_HPP
#define SPOC_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace spoc {

/// (seed, stream) pair identifying an independent random sequence.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Order-sensitive mix of two 64-bit words; used to derive substream ids.
inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    std::uint64_t s = a * 0x100000001b3ULL ^ 0xcbf29ce484222325ULL;
    std::uint64_t h = splitmix64(s);
    s = h ^ b;
    return splitmix64(s);
}

/// Portable random stream. All derived variates are computed here rather
/// than through <random> distributions, whose output is implementation
/// defined, so a given (seed, stream) produces the same draws everywhere.
class Rng {
  public:
    explicit Rng(RngSeed s = {}) : seed_(s) {
        std::uint64_t state = hash_combine(s.seed, s.stream);
        std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(state)),
                          static_cast<std::uint32_t>(splitmix64(state)),
                          static_cast<std::uint32_t>(splitmix64(state)),
                          static_cast<std::uint32_t>(splitmix64(state))};
        engine_.seed(seq);
    }
    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(RngSeed{seed, stream}) {}

    [[nodiscard]] RngSeed seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open0() { return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Lemire-style rejection keeps the result unbiased.
        const std::uint64_t limit = (~std::uint64_t{0} / n) * n;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    /// Gamma(shape, 1) by Marsaglia-Tsang; shapes below one use the
    /// U^(1/shape) boost.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform_open0(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_open0();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

  private:
    RngSeed seed_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace spoc

#endif // SPOC_RANDOM_HPP
