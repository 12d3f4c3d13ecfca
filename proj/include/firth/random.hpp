#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace firth {

/// Seeded generator whose draws are identical on every platform. The standard
/// <random> distributions are implementation-defined, so only the raw
/// mt19937_64 stream is used.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Integer uniform on [lo, hi].
    int integer(int lo, int hi) {
        return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double normal() {
        // Box-Muller; 1 - uniform() keeps the log argument in (0, 1].
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    Eigen::VectorXd normal_vector(Eigen::Index size) {
        Eigen::VectorXd v(size);
        for (Eigen::Index j = 0; j < size; ++j) v(j) = normal();
        return v;
    }

    Eigen::VectorXd unit_vector(Eigen::Index size) {
        Eigen::VectorXd v;
        do {
            v = normal_vector(size);
        } while (v.norm() < 1e-12);
        return v.normalized();
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace firth
