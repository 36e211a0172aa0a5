#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ambistop {

// Bracketed bisection to absolute tolerance tol on x. Requires a sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol = 1e-12, int max_iter = 200);

// Scan [lo, hi] with n points, return brackets of every sign change of f.
std::vector<std::pair<double, double>> scan_brackets(
    const std::function<double(double)>& f, double lo, double hi, int n);

// Golden-section minimization on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-11);

// Composite Simpson on [a, b] with n subintervals (n made even).
double simpson(const std::function<double(double)>& f, double a, double b, int n);

// Classic RK4 fixed-step integration of y' = f(x, y), returning y at x1.
template <std::size_t N>
std::array<double, N> rk4(const std::function<std::array<double, N>(double, const std::array<double, N>&)>& f,
                          double x0, std::array<double, N> y, double x1, int steps) {
    const double h = (x1 - x0) / steps;
    auto axpy = [](std::array<double, N> a, const std::array<double, N>& b, double s) {
        for (std::size_t i = 0; i < N; ++i) a[i] += s * b[i];
        return a;
    };
    double x = x0;
    for (int k = 0; k < steps; ++k) {
        const auto k1 = f(x, y);
        const auto k2 = f(x + h / 2, axpy(y, k1, h / 2));
        const auto k3 = f(x + h / 2, axpy(y, k2, h / 2));
        const auto k4 = f(x + h, axpy(y, k3, h));
        for (std::size_t i = 0; i < N; ++i)
            y[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        x += h;
    }
    return y;
}

// Adaptive Runge-Kutta-Fehlberg 4(5) for a scalar ODE y' = f(x, y).
double rkf45(const std::function<double(double, double)>& f, double x0, double y0,
             double x1, double rtol = 1e-10, double atol = 1e-12);

// Dense C^1 solution table for a scalar 2nd-order ODE, sampled on a uniform
// grid; evaluation uses cubic Hermite interpolation of (value, slope) knots.
class HermiteTable {
public:
    HermiteTable() = default;
    HermiteTable(double x0, double dx, std::vector<double> value, std::vector<double> slope)
        : x0_(x0), dx_(dx), v_(std::move(value)), s_(std::move(slope)) {}

    double x_front() const { return x0_; }
    double x_back() const { return x0_ + dx_ * (static_cast<double>(v_.size()) - 1.0); }
    bool contains(double x) const;
    double value(double x) const;
    double slope(double x) const;

private:
    std::pair<std::size_t, double> locate(double x) const;
    double x0_ = 0.0, dx_ = 1.0;
    std::vector<double> v_, s_;
};

// Deterministic, implementation-independent RNG: splitmix64-seeded xoshiro256**.
// Distributions are hand-rolled from raw bits so output is byte-identical
// across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& si : s_) {
            x += 0x9e3779b97f4a7c15ull;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
            si = z ^ (z >> 31);
        }
    }
    static Rng for_path(std::uint64_t seed, std::uint64_t index) {
        return Rng(seed * 0x9e3779b97f4a7c15ull + index * 0xda942042e4dd58b5ull + 0x2545f4914f6cdd1dull);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }
    // uniform in (0,1)
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }
    double exponential(double rate) { return -std::log(uniform()) / rate; }
    bool bernoulli(double p) { return uniform() < p; }
    // Box-Muller; second draw cached
    double normal();

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ambistop
