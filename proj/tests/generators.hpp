#pragma once

// Hand-rolled random generators for the property tests.

#include "mrc/shapley.hpp"
#include "mrc/types.hpp"

#include <array>
#include <cstdint>
#include <random>

namespace gen {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : e_(seed) {}

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
    double unit() { return static_cast<double>(e_() >> 11) * 0x1.0p-53; }
    int integer(int lo, int hi) { return lo + static_cast<int>(e_() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool coin(double p = 0.5) { return unit() < p; }

    std::mt19937_64& engine() { return e_; }

private:
    std::mt19937_64 e_;
};

inline std::array<double, 7> game_values(Rng& r, double lo = -5.0, double hi = 5.0) {
    std::array<double, 7> v{};
    for (auto& x : v) x = r.uniform(lo, hi);
    return v;
}

inline mrc::CharacteristicGame<double> game(Rng& r, int n, double lo = -5.0, double hi = 5.0) {
    mrc::CharacteristicGame<double> g(n);
    for (std::uint32_t m = 1; m < (1U << n); ++m) g.set(mrc::CoalitionId(m), r.uniform(lo, hi));
    return g;
}

// Random point on the probability simplex of size n (some coordinates may be tiny).
inline mrc::Vector simplex(Rng& r, Eigen::Index n) {
    mrc::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = -std::log(1.0 - r.unit());
    return v / v.sum();
}

// Feasible portfolio: cash in [0, c_max], assets each <= w_max.
inline mrc::Portfolio feasible_portfolio(Rng& r, Eigen::Index k, double w_max = 0.4, double c_max = 0.3) {
    for (;;) {
        const double cash = r.uniform(0.0, c_max);
        mrc::Vector w = simplex(r, k) * (1.0 - cash);
        if ((w.array() <= w_max).all()) return {w, cash};
    }
}

// Arbitrary nonnegative raw vector, not normalised.
inline mrc::Portfolio raw_portfolio(Rng& r, Eigen::Index k) {
    mrc::Vector w(k);
    for (Eigen::Index i = 0; i < k; ++i) w(i) = r.coin(0.2) ? 0.0 : r.uniform(0.0, 2.0);
    return {w, r.uniform(0.0, 1.0)};
}

inline mrc::Vector normals(Rng& r, Eigen::Index n, double sd = 1.0) {
    std::normal_distribution<double> d(0.0, sd);
    mrc::Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = d(r.engine());
    return v;
}

}  // namespace gen
