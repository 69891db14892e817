#include "lowform/random.hpp"

#include <cmath>
#include <numbers>

namespace lowform {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : engine_(mix_seed(seed, stream)) {}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::uniform_open() {
    double u;
    do {
        u = uniform();
    } while (u == 0.0);
    return u;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

Vector Rng::normal_vector(std::size_t n) {
    Vector v(n);
    for (double& x : v) x = normal();
    return v;
}

Vector Rng::sphere_point(std::size_t n) {
    for (;;) {
        Vector v = normal_vector(n);
        const double r = norm2(v);
        if (r > 1e-300) {
            for (double& x : v) x /= r;
            return v;
        }
    }
}

Vector Rng::ball_point(std::size_t n) {
    Vector v = sphere_point(n);
    const double radius = std::pow(uniform_open(), 1.0 / static_cast<double>(n));
    for (double& x : v) x *= radius;
    return v;
}

}  // namespace lowform
