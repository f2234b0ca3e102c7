#pragma once

#include <cstdint>
#include <random>

namespace mixedsel {

/// Standard-normal quantile (inverse CDF), Wichura's AS 241 double-precision
/// rational approximation.
double normal_quantile(double prob);

/// Deterministic scalar stream: mt19937_64 uniforms mapped to (0,1) with 53
/// bits, normals via the inverse CDF. The stream is identical on every
/// platform for a given seed.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

    double uniform() {
        // (x + 0.5) / 2^53 over the top 53 bits, strictly inside (0,1).
        return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() { return normal_quantile(uniform()); }

private:
    std::mt19937_64 gen_;
};

}  // namespace mixedsel
