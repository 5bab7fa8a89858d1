#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace scatfun::rng {

// Self-contained counter-free PRNG so that artifacts are byte-identical across
// platforms and standard libraries (std::normal_distribution is not portable).
//
// Stream splitting rule (documented contract): the stream for trial t under
// master seed s is seeded with splitmix64(splitmix64(s) + (t+1)*GOLDEN), which
// gives statistically independent streams for distinct (s, t).

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(splitmix64(seed)) {}

    static Stream for_trial(std::uint64_t master_seed, std::uint64_t trial) {
        return Stream(splitmix64(master_seed) + (trial + 1) * kGolden);
    }

    std::uint64_t next_u64() {
        state_ += kGolden;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    // uniform in (0, 1]; never returns 0 so it is safe under log()
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // standard normal pair via Box-Muller; consumes exactly two uniforms
    void next_gauss_pair(double& g1, double& g2) {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        g1 = r * std::cos(a);
        g2 = r * std::sin(a);
    }

    double next_gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double g1, g2;
        next_gauss_pair(g1, g2);
        spare_ = g2;
        have_spare_ = true;
        return g1;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace scatfun::rng
