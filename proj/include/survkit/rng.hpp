#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "survkit/common.hpp"

namespace survkit {

// SplitMix64 step, used to derive independent per-replicate seeds from a master
// seed so resampling loops stay reproducible regardless of execution order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master ^ (0x9e3779b97f4a7c15ull * (stream + 1));
    return splitmix64(s);
}

// mt19937_64 plus hand-rolled transforms.  The standard library distribution
// objects are not bit-stable across implementations, and reruns of a seeded
// analysis must match byte for byte, so every variate is generated here.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer on [0, n), rejection sampled to avoid modulo bias.
    std::uint64_t uniform_int(std::uint64_t n) {
        if (n == 0) throw NumericError("uniform_int: n must be positive");
        std::uint64_t mask = ~0ull >> __builtin_clzll(n | 1);
        for (;;) {
            std::uint64_t v = engine_() & mask;
            if (v < n) return v;
        }
    }

    // Marsaglia polar method with a cached spare.
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
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    double exponential(double rate) {
        if (rate <= 0.0) throw NumericError("exponential: rate must be positive");
        return -std::log(1.0 - uniform()) / rate;
    }

    // Marsaglia-Tsang squeeze for shape >= 1, boost trick below 1.
    double gamma(double shape, double rate) {
        if (shape <= 0.0 || rate <= 0.0) throw NumericError("gamma: parameters must be positive");
        if (shape < 1.0) {
            double u = uniform();
            while (u <= 0.0) u = uniform();
            return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
        }
        double d = shape - 1.0 / 3.0;
        double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
        }
    }

    // Inverse gamma with the shape/scale convention: X = scale / Gamma(shape, 1).
    double inv_gamma(double shape, double scale) { return 1.0 / gamma(shape, scale); }

    double beta(double a, double b) {
        double x = gamma(a, 1.0);
        double y = gamma(b, 1.0);
        return x / (x + y);
    }

    // Michael-Schucany-Haas transform for the inverse Gaussian IG(mean, shape).
    double inverse_gaussian(double mean, double shape) {
        if (mean <= 0.0 || shape <= 0.0)
            throw NumericError("inverse_gaussian: parameters must be positive");
        double z = normal();
        double y = z * z;
        double x = mean + mean * mean * y / (2.0 * shape) -
                   (mean / (2.0 * shape)) * std::sqrt(4.0 * mean * shape * y + mean * mean * y * y);
        if (x <= 0.0) x = std::numeric_limits<double>::min();
        if (uniform() <= mean / (mean + x)) return x;
        return mean * mean / x;
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace survkit
