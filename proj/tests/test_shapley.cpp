#include "generators.hpp"
#include "mrc/shapley.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

using namespace mrc;

namespace {

// Independent oracle: average marginal contribution over explicit orderings,
// written without the library's coalition helpers.
std::vector<double> brute_force(const std::array<double, 7>& v) {
    // index by bitmask over players 0..2
    double val[8] = {0.0};
    val[0b001] = v[0];
    val[0b010] = v[1];
    val[0b100] = v[2];
    val[0b011] = v[3];
    val[0b101] = v[4];
    val[0b110] = v[5];
    val[0b111] = v[6];
    std::vector<double> phi(3, 0.0);
    int order[3] = {0, 1, 2};
    int count = 0;
    do {
        int mask = 0;
        for (int p : order) {
            phi[static_cast<std::size_t>(p)] += val[mask | (1 << p)] - val[mask];
            mask |= 1 << p;
        }
        ++count;
    } while (std::next_permutation(order, order + 3));
    for (auto& x : phi) x /= count;
    return phi;
}

}  // namespace

TEST_CASE("coalition ids encode members as a bitmask") {
    const auto s = CoalitionId::of({0, 2});
    CHECK(s.mask() == 5U);
    CHECK(s.size() == 2);
    CHECK(s.label() == "13");
    CHECK(s.contains(2));
    CHECK_FALSE(s.contains(1));
    CHECK(s.with(1) == CoalitionId(7));
    CHECK(s.without(0) == CoalitionId::of({2}));
    CHECK(kThreePlayerOrder[6].label() == "123");
    CHECK(kPairOrder[2].label() == "23");
}

TEST_CASE("games reject assignments to the empty coalition") {
    CharacteristicGame<double> g(3);
    CHECK_THROWS_AS(g.set(CoalitionId(0), 1.0), Error);
}

TEST_CASE("worked Shapley examples") {
    SUBCASE("asymmetric game") {
        const auto g = CharacteristicGame<double>::three_player({1, 2, 3, 4, 5, 6, 9});
        for (const auto& c : {shapley_exact(g), shapley_by_coalitions(g), shapley_closed3(g)}) {
            CHECK(c.phi(0) == doctest::Approx(2.0).epsilon(1e-14));
            CHECK(c.phi(1) == doctest::Approx(3.0).epsilon(1e-14));
            CHECK(c.phi(2) == doctest::Approx(4.0).epsilon(1e-14));
            CHECK(c.phi.sum() == doctest::Approx(9.0));
        }
    }
    SUBCASE("additive game") {
        const auto g = CharacteristicGame<double>::three_player({1, 1, 1, 2, 2, 2, 3});
        const auto c = shapley_closed3(g);
        for (int i = 0; i < 3; ++i) CHECK(c.phi(i) == doctest::Approx(1.0));
        CHECK(c.weights.isApprox(Vector::Constant(3, 1.0 / 3.0)));
    }
    SUBCASE("null game") {
        const auto c = shapley_closed3(CharacteristicGame<double>(3));
        CHECK(c.phi.isZero(0.0));
        CHECK(c.weights.isApprox(Vector::Constant(3, 1.0 / 3.0)));
    }
    SUBCASE("dummy player three") {
        // v3 = 0, v13 = v1, v23 = v2, v123 = v12
        const auto g = CharacteristicGame<double>::three_player({1.5, -0.7, 0.0, 2.2, 1.5, -0.7, 2.2});
        CHECK(std::abs(shapley_exact(g).phi(2)) < 1e-12);
        CHECK(std::abs(shapley_closed3(g).phi(2)) < 1e-12);
    }
}

TEST_CASE("closed form, enumeration and coalition formula agree with an independent oracle") {
    gen::Rng rng(11);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto v = gen::game_values(rng);
        const auto g = CharacteristicGame<double>::three_player(v);
        const auto oracle = brute_force(v);
        const auto a = shapley_exact(g).phi;
        const auto b = shapley_by_coalitions(g).phi;
        const auto c = shapley_closed3(g).phi;
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(a(i) - oracle[static_cast<std::size_t>(i)]) < 1e-12);
            CHECK(std::abs(b(i) - a(i)) < 1e-12);
            CHECK(std::abs(c(i) - a(i)) < 1e-12);
        }
    }
}

TEST_CASE("general-N enumeration satisfies efficiency and matches the coalition formula") {
    gen::Rng rng(12);
    for (int n = 1; n <= 6; ++n) {
        const auto g = gen::game(rng, n);
        const auto a = shapley_exact(g);
        const auto b = shapley_by_coalitions(g);
        CHECK(std::abs(a.phi.sum() - g(g.grand())) < 1e-9);
        CHECK((a.phi - b.phi).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("enumeration guard and closed-form arity are enforced") {
    CHECK_THROWS_WITH_AS(shapley_exact(CharacteristicGame<double>(13)), doctest::Contains("12"), Error);
    CHECK_THROWS_AS(shapley_closed3(CharacteristicGame<double>(4)), Error);
}

TEST_CASE("truncate_normalize") {
    CHECK(truncate_normalize<double>((Vector(3) << 2, -1, 1).finished())
              .isApprox((Vector(3) << 2.0 / 3.0, 0.0, 1.0 / 3.0).finished()));
    CHECK(truncate_normalize<double>((Vector(3) << -1, -2, -3).finished()).isApprox(Vector::Constant(3, 1.0 / 3.0)));
    CHECK(truncate_normalize<double>(Vector::Ones(3)).isApprox(Vector::Constant(3, 1.0 / 3.0)));
}

TEST_CASE("property: truncated weights are on the simplex and scale invariant") {
    gen::Rng rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const Vector phi = gen::normals(rng, 3);
        const Vector w = truncate_normalize(phi);
        CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((w.array() >= 0.0).all());
        const double scale = rng.uniform(0.01, 100.0);
        CHECK((truncate_normalize<double>(phi * scale) - w).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("axiom report on random, symmetric and dummy games") {
    gen::Rng rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        auto v = gen::game_values(rng);
        if (trial % 3 == 1) {
            v[1] = v[0];  // players 1, 2 symmetric
            v[4] = v[5];
        } else if (trial % 3 == 2) {
            v[2] = 0.0;  // player 3 dummy
            v[4] = v[0];
            v[5] = v[1];
            v[6] = v[3];
        }
        const auto g = CharacteristicGame<double>::three_player(v);
        const auto credit = shapley_closed3(g);
        const auto rep = axiom_check(g, credit, static_cast<std::uint64_t>(trial));
        CHECK(rep.efficiency_ok());
        CHECK(rep.symmetry_ok());
        CHECK(rep.dummy_ok());
        CHECK(rep.additivity_ok());
        if (trial % 3 == 1) CHECK(std::find(rep.symmetric_pairs.begin(), rep.symmetric_pairs.end(), std::pair{0, 1}) != rep.symmetric_pairs.end());
        if (trial % 3 == 2) CHECK(std::find(rep.dummies.begin(), rep.dummies.end(), 2) != rep.dummies.end());
    }
}

TEST_CASE("templated scalar: long double closed form agrees with double") {
    gen::Rng rng(15);
    const auto v = gen::game_values(rng);
    std::array<long double, 7> lv{};
    std::copy(v.begin(), v.end(), lv.begin());
    const auto a = shapley_closed3(CharacteristicGame<long double>::three_player(lv)).phi;
    const auto b = shapley_closed3(CharacteristicGame<double>::three_player(v)).phi;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(static_cast<double>(a(i)) - b(i)) < 1e-13);
}
