#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "gtomo/core.hpp"
#include "gtomo/rng.hpp"

namespace testing {

inline std::vector<float> uniform_values(std::size_t count, std::uint64_t seed, float lo = 0.0f, float hi = 1.0f) {
    gtomo::Rng rng(seed);
    std::uniform_real_distribution<float> u(lo, hi);
    std::vector<float> v(count);
    for (float& x : v) x = u(rng);
    return v;
}

inline gtomo::Volume random_volume(int n, std::uint64_t seed) {
    return gtomo::Volume(n, uniform_values(static_cast<std::size_t>(n) * n * n, seed));
}

inline gtomo::Image random_image(int n, std::uint64_t seed) {
    return gtomo::Image(n, uniform_values(static_cast<std::size_t>(n) * n, seed));
}

inline double norm(std::span<const float> v) {
    double s = 0;
    for (float x : v) s += static_cast<double>(x) * x;
    return std::sqrt(s);
}

inline double relative_difference(std::span<const float> a, std::span<const float> b) {
    double d = 0, s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += (static_cast<double>(a[i]) - b[i]) * (static_cast<double>(a[i]) - b[i]);
        s += static_cast<double>(b[i]) * b[i];
    }
    return s > 0 ? std::sqrt(d / s) : std::sqrt(d);
}

}  // namespace testing
