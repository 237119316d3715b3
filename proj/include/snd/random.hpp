#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace snd {

// SplitMix64 step, used as the seed-derivation mixer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a master seed and a path of tags.
// Rule: fold each tag with seed' = splitmix64(seed ^ splitmix64(tag)).
// Trials, slots and substreams (traffic/fading/noise) all hang off this, which
// keeps parallel runs reproducible for any worker count.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(master);
    for (std::uint64_t tag : path) s = splitmix64(s ^ splitmix64(tag));
    return s;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return eng_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // inclusive range
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    // N(0,1), polar Box-Muller with a cached spare
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

    long poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 60.0) return poisson(mean / 2.0) + poisson(mean - mean / 2.0);
        const double limit = std::exp(-mean);
        long k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    // Independent child stream; independent of draws made so far.
    Rng fork(std::uint64_t tag) const { return Rng(derive_seed(seed_, {tag})); }

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace snd
