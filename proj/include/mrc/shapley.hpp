#pragma once

// Exact Shapley values for small cooperative games.
//
// Coalitions are encoded as bitmasks over players 0..N-1, so the nonempty
// coalitions map one-to-one onto 1..2^N-1 and v(empty) lives at index 0.

#include "mrc/types.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <random>
#include <vector>

namespace mrc {

inline constexpr int kMaxEnumerationPlayers = 12;

class CoalitionId {
public:
    using Mask = std::uint32_t;

    constexpr CoalitionId() = default;
    constexpr explicit CoalitionId(Mask mask) : mask_(mask) {}

    // Members are zero-based player indices.
    static CoalitionId of(std::initializer_list<int> members) {
        Mask m = 0;
        for (int i : members) m |= Mask{1} << i;
        return CoalitionId(m);
    }

    constexpr Mask mask() const { return mask_; }
    constexpr int size() const { return std::popcount(mask_); }
    constexpr bool contains(int player) const { return (mask_ >> player) & 1U; }
    constexpr CoalitionId with(int player) const { return CoalitionId(mask_ | (Mask{1} << player)); }
    constexpr CoalitionId without(int player) const { return CoalitionId(mask_ & ~(Mask{1} << player)); }

    std::vector<int> members() const {
        std::vector<int> out;
        for (int i = 0; i < 32; ++i)
            if (contains(i)) out.push_back(i);
        return out;
    }

    // "1", "12", "123" (one-based, sorted).
    std::string label() const {
        std::string s;
        for (int i : members()) s += std::to_string(i + 1);
        return s;
    }

    friend constexpr bool operator==(CoalitionId, CoalitionId) = default;

private:
    Mask mask_ = 0;
};

// The seven N=3 coalitions in the canonical (v1, v2, v3, v12, v13, v23, v123) order.
inline const std::array<CoalitionId, 7> kThreePlayerOrder{
    CoalitionId::of({0}),    CoalitionId::of({1}),    CoalitionId::of({2}),      CoalitionId::of({0, 1}),
    CoalitionId::of({0, 2}), CoalitionId::of({1, 2}), CoalitionId::of({0, 1, 2}),
};

// Pairs (1,2), (1,3), (2,3) in that order.
inline const std::array<CoalitionId, 3> kPairOrder{CoalitionId::of({0, 1}), CoalitionId::of({0, 2}),
                                                   CoalitionId::of({1, 2})};

template <typename Scalar>
class CharacteristicGame {
public:
    explicit CharacteristicGame(int n_players) : n_(n_players) {
        if (n_players < 1 || n_players > 30) throw Error("player count out of range");
        values_ = VectorX<Scalar>::Zero(Eigen::Index{1} << n_players);
    }

    // (v1, v2, v3, v12, v13, v23, v123).
    static CharacteristicGame three_player(const std::array<Scalar, 7>& v) {
        CharacteristicGame g(3);
        for (std::size_t i = 0; i < 7; ++i) g.set(kThreePlayerOrder[i], v[i]);
        return g;
    }

    int players() const { return n_; }
    CoalitionId grand() const { return CoalitionId((CoalitionId::Mask{1} << n_) - 1); }

    Scalar operator()(CoalitionId s) const { return values_(static_cast<Eigen::Index>(s.mask())); }
    void set(CoalitionId s, Scalar v) {
        if (s.mask() == 0) throw Error("v(empty) is fixed at zero");
        values_(static_cast<Eigen::Index>(s.mask())) = v;
    }

    const VectorX<Scalar>& values() const { return values_; }

    std::array<Scalar, 7> as_three_player() const {
        if (n_ != 3) throw Error("game is not three-player");
        std::array<Scalar, 7> out{};
        for (std::size_t i = 0; i < 7; ++i) out[i] = (*this)(kThreePlayerOrder[i]);
        return out;
    }

    friend CharacteristicGame operator+(const CharacteristicGame& a, const CharacteristicGame& b) {
        if (a.n_ != b.n_) throw Error("games differ in player count");
        CharacteristicGame out(a.n_);
        out.values_ = a.values_ + b.values_;
        return out;
    }

private:
    int n_;
    VectorX<Scalar> values_;
};

template <typename Scalar>
struct ShapleyCredit {
    VectorX<Scalar> phi;       // raw values, efficient
    VectorX<Scalar> phi_plus;  // max(phi, 0)
    VectorX<Scalar> weights;   // phi_plus normalised; uniform when all phi <= 0
};

// phi_plus / sum(phi_plus), falling back to 1/N when no agent has positive credit.
template <typename Scalar>
VectorX<Scalar> truncate_normalize(const VectorX<Scalar>& phi) {
    VectorX<Scalar> plus = phi.cwiseMax(Scalar(0));
    const Scalar total = plus.sum();
    if (!(total > Scalar(0))) return VectorX<Scalar>::Constant(phi.size(), Scalar(1) / Scalar(phi.size()));
    return plus / total;
}

template <typename Scalar>
ShapleyCredit<Scalar> make_credit(VectorX<Scalar> phi) {
    ShapleyCredit<Scalar> c;
    c.phi_plus = phi.cwiseMax(Scalar(0));
    c.weights = truncate_normalize(phi);
    c.phi = std::move(phi);
    return c;
}

// Average marginal contribution over all N! arrival orders.
template <typename Scalar>
ShapleyCredit<Scalar> shapley_exact(const CharacteristicGame<Scalar>& game) {
    const int n = game.players();
    if (n > kMaxEnumerationPlayers)
        throw Error("permutation enumeration limited to N <= " + std::to_string(kMaxEnumerationPlayers) +
                    " players (got " + std::to_string(n) + ")");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    VectorX<Scalar> sum = VectorX<Scalar>::Zero(n);
    std::uint64_t count = 0;
    do {
        CoalitionId before;
        Scalar prev(0);
        for (int player : order) {
            const CoalitionId after = before.with(player);
            const Scalar cur = game(after);
            sum(player) += cur - prev;
            prev = cur;
            before = after;
        }
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    return make_credit<Scalar>(sum / Scalar(count));
}

// Coalition-weight form: sum over S not containing i of |S|!(N-|S|-1)!/N! [v(S+i) - v(S)].
template <typename Scalar>
ShapleyCredit<Scalar> shapley_by_coalitions(const CharacteristicGame<Scalar>& game) {
    const int n = game.players();
    std::vector<Scalar> fact(static_cast<std::size_t>(n) + 1, Scalar(1));
    for (int k = 1; k <= n; ++k) fact[k] = fact[k - 1] * Scalar(k);
    VectorX<Scalar> phi = VectorX<Scalar>::Zero(n);
    const CoalitionId::Mask full = game.grand().mask();
    for (int i = 0; i < n; ++i) {
        for (CoalitionId::Mask m = 0; m <= full; ++m) {
            const CoalitionId s(m);
            if (s.contains(i)) continue;
            const int k = s.size();
            const Scalar weight = fact[k] * fact[n - k - 1] / fact[n];
            const Scalar vs = m == 0 ? Scalar(0) : game(s);
            phi(i) += weight * (game(s.with(i)) - vs);
        }
    }
    return make_credit<Scalar>(std::move(phi));
}

// Closed form for three players.
template <typename Scalar>
ShapleyCredit<Scalar> shapley_closed3(const CharacteristicGame<Scalar>& game) {
    if (game.players() != 3)
        throw Error("closed-form Shapley requires exactly 3 players (got " + std::to_string(game.players()) + ")");
    const auto [v1, v2, v3, v12, v13, v23, v123] = game.as_three_player();
    const Scalar third = Scalar(1) / Scalar(3);
    const Scalar sixth = Scalar(1) / Scalar(6);
    VectorX<Scalar> phi(3);
    phi(0) = third * v1 + sixth * (v12 - v2) + sixth * (v13 - v3) + third * (v123 - v23);
    phi(1) = third * v2 + sixth * (v12 - v1) + sixth * (v23 - v3) + third * (v123 - v13);
    phi(2) = third * v3 + sixth * (v13 - v1) + sixth * (v23 - v2) + third * (v123 - v12);
    return make_credit<Scalar>(std::move(phi));
}

struct AxiomReport {
    double efficiency_residual = 0.0;
    std::vector<std::pair<int, int>> symmetric_pairs;
    double symmetry_residual = 0.0;
    std::vector<int> dummies;
    double dummy_residual = 0.0;
    double additivity_residual = 0.0;

    bool efficiency_ok(double tol = 1e-9) const { return efficiency_residual < tol; }
    bool symmetry_ok(double tol = 1e-12) const { return symmetry_residual < tol; }
    bool dummy_ok(double tol = 1e-12) const { return dummy_residual < tol; }
    bool additivity_ok(double tol = 1e-9) const { return additivity_residual < tol; }
    bool all_ok() const { return efficiency_ok() && symmetry_ok() && dummy_ok() && additivity_ok(); }
};

namespace detail {

template <typename Scalar>
Scalar game_value(const CharacteristicGame<Scalar>& g, CoalitionId s) {
    return s.mask() == 0 ? Scalar(0) : g(s);
}

template <typename Scalar>
bool interchangeable(const CharacteristicGame<Scalar>& g, int i, int j, double tol) {
    const CoalitionId::Mask full = g.grand().mask();
    for (CoalitionId::Mask m = 0; m <= full; ++m) {
        const CoalitionId s(m);
        if (s.contains(i) || s.contains(j)) continue;
        if (std::abs(static_cast<double>(g(s.with(i)) - g(s.with(j)))) > tol) return false;
    }
    return true;
}

template <typename Scalar>
bool is_dummy(const CharacteristicGame<Scalar>& g, int i, double tol) {
    const CoalitionId::Mask full = g.grand().mask();
    for (CoalitionId::Mask m = 0; m <= full; ++m) {
        const CoalitionId s(m);
        if (s.contains(i)) continue;
        if (std::abs(static_cast<double>(g(s.with(i)) - game_value(g, s))) > tol) return false;
    }
    return true;
}

}  // namespace detail

// Checks the four axioms on the raw values. Additivity pairs the game with a
// random companion game drawn from `seed` and compares against the enumerator.
template <typename Scalar>
AxiomReport axiom_check(const CharacteristicGame<Scalar>& game, const ShapleyCredit<Scalar>& credit,
                        std::uint64_t seed = 0x5eed) {
    AxiomReport r;
    const int n = game.players();
    r.efficiency_residual = std::abs(static_cast<double>(credit.phi.sum() - game(game.grand())));

    constexpr double detect_tol = 1e-12;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (!detail::interchangeable(game, i, j, detect_tol)) continue;
            r.symmetric_pairs.emplace_back(i, j);
            r.symmetry_residual =
                std::max(r.symmetry_residual, std::abs(static_cast<double>(credit.phi(i) - credit.phi(j))));
        }
        if (detail::is_dummy(game, i, detect_tol)) {
            r.dummies.push_back(i);
            r.dummy_residual = std::max(r.dummy_residual, std::abs(static_cast<double>(credit.phi(i))));
        }
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    CharacteristicGame<Scalar> other(n);
    for (CoalitionId::Mask m = 1; m <= game.grand().mask(); ++m) other.set(CoalitionId(m), Scalar(dist(rng)));
    const auto sum_phi = shapley_exact(game + other).phi;
    const auto split = (credit.phi + shapley_exact(other).phi).eval();
    r.additivity_residual = static_cast<double>((sum_phi - split).cwiseAbs().maxCoeff());
    return r;
}

}  // namespace mrc
