#pragma once

#include "igdiv/types.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace igdiv {

// Deterministic sampling helper. Distribution shaping is spelled out by hand
// (ldexp uniforms, Box-Muller normals) so a given seed yields the same draw
// sequence regardless of the standard library's <random> internals.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return std::ldexp(static_cast<double>(gen_() >> 11), -53); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    double normal() {
        // Box-Muller, one value per call pair.
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01(), u2 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform direction on the unit sphere in R^n.
    Vec unit_vector(int n) {
        Vec v(n);
        double norm2 = 0.0;
        do {
            for (int i = 0; i < n; ++i) v[i] = normal();
            norm2 = v.squaredNorm();
        } while (norm2 < 1e-12);
        return v / std::sqrt(norm2);
    }

    /// Uniform draw from the ball of the given radius in R^n.
    Vec in_ball(int n, double radius) {
        const double u = std::pow(uniform01(), 1.0 / n);
        return unit_vector(n) * (radius * u);
    }

  private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace igdiv
