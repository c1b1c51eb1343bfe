#pragma once

// Seeded generators and small numeric helpers shared by the unit tests.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "quadrix/funcspec.hpp"

namespace quadrix::testing {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    int integer(int lo, int hi) { return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1)); }

    Vec box(int n, double half) {
        Vec x(n);
        for (int i = 0; i < n; ++i) {
            x[i] = uniform(-half, half);
        }
        return x;
    }

    Vec positive(int n, double lo, double hi) {
        Vec a(n);
        for (int i = 0; i < n; ++i) {
            a[i] = uniform(lo, hi);
        }
        return a;
    }

private:
    std::mt19937_64 rng_;
};

inline Vec vec(std::initializer_list<double> v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    int i = 0;
    for (double x : v) {
        out[i++] = x;
    }
    return out;
}

inline std::vector<double> stdvec(const Vec& v) { return {v.data(), v.data() + v.size()}; }

inline double rel_err(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

} // namespace quadrix::testing
