#include "generators.hpp"
#include "mrc/ewp.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace mrc;

TEST_CASE("ewp weights decay geometrically from the newest observation") {
    const Vector w = ewp_weights<double>(1000, 252.0);
    CHECK(w(999) == 1.0);
    CHECK(w(999 - 252) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(w(999 - 756) == doctest::Approx(0.049787068367863944).epsilon(1e-14));
    for (Eigen::Index i = 1; i < w.size(); ++i) CHECK(w(i) > w(i - 1));
    CHECK_THROWS_AS(ewp_weights<double>(0, 252.0), Error);
    CHECK_THROWS_AS(ewp_weights<double>(5, 0.0), Error);
}

TEST_CASE("ewp moments") {
    const std::vector<double> flat(20, 0.01);
    auto m = ewp_moments<double>(flat, 252.0);
    CHECK(m.mean == doctest::Approx(0.01));
    CHECK(m.stddev < 1e-15);

    const std::vector<double> two{0.0, 0.02};
    m = ewp_moments<double>(two, std::numeric_limits<double>::infinity());
    CHECK(m.mean == doctest::Approx(0.01));
    CHECK(m.stddev == doctest::Approx(0.01));

    const std::vector<double> rev{0.02, 0.0};
    m = ewp_moments<double>(rev, 1.0);
    const double e = std::exp(-1.0);
    CHECK(m.mean == doctest::Approx(0.02 * e / (e + 1.0)).epsilon(1e-14));
    CHECK(m.mean == doctest::Approx(0.005379).epsilon(1e-4));

    CHECK_THROWS_WITH_AS(ewp_moments<double>(std::span<const double>{}, 252.0), doctest::Contains("cold ledger"), Error);
}

TEST_CASE("characteristic value") {
    const CharValueParams p;
    // Independent evaluation of 0.4 * sqrt(365) * 0.1 + 0.6 * 0.365.
    const double expected = 0.4 * std::sqrt(365.0) * 0.1 + 0.6 * 365.0 * 0.001;
    CHECK(char_value_from_moments(0.001, 0.01, p) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(char_value_from_moments(0.001, 0.01, p) == doctest::Approx(0.983199).epsilon(1e-6));
    CHECK(char_value_from_moments(0.0, 0.02, p) == 0.0);
    CHECK(char_value_from_moments(0.001, 0.0, p) == doctest::Approx(4.219));
    CHECK(char_value_from_moments(-0.001, 0.0, p) == doctest::Approx(-4.219));

    const std::vector<double> flat(30, 0.001);
    CHECK(char_value(flat, p) == doctest::Approx(4.219));
    CHECK(char_value(std::span<const double>{}, p) == 0.0);
}

TEST_CASE("EWP attenuation bound and equal-weight comparator") {
    const double iota = early_influence_ratio<double>(100, 400, 60.0);
    CHECK(iota <= 2.0 * std::exp(-5.0));
    CHECK(early_influence_ratio<double>(100, 400, std::numeric_limits<double>::infinity()) == 100.0 / 400.0);
}

TEST_CASE("property: halving h never increases early influence") {
    gen::Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int t = rng.integer(2, 800);
        const int n0 = rng.integer(1, t - 1);
        const double h = rng.uniform(1.0, 400.0);
        CHECK(early_influence_ratio<double>(n0, t, h / 2.0) <= early_influence_ratio<double>(n0, t, h) + 1e-15);
    }
}

TEST_CASE("property: a prefix lagged by 10h barely moves the value") {
    gen::Rng rng(22);
    const CharValueParams p{.decay_h = 20.0};
    for (int trial = 0; trial < 50; ++trial) {
        const Vector recent = gen::normals(rng, 40, 0.02).array() + 0.001;
        std::vector<double> base(recent.data(), recent.data() + recent.size());
        std::vector<double> longer;
        const int k = rng.integer(1, 10);
        for (int i = 0; i < k; ++i) longer.push_back(rng.uniform(-0.05, 0.05));
        // pad so the prefix sits at least 10h behind the newest observation
        while (longer.size() + base.size() < static_cast<std::size_t>(10 * p.decay_h) + base.size())
            longer.push_back(base[longer.size() % base.size()]);
        std::vector<double> a = longer, b = longer;
        for (int i = 0; i < k; ++i) b[static_cast<std::size_t>(i)] = 0.0;  // different prefix
        a.insert(a.end(), base.begin(), base.end());
        b.insert(b.end(), base.begin(), base.end());
        CHECK(std::abs(char_value(a, p) - char_value(b, p)) < 1e-4 * k);
    }
}

TEST_CASE("return history keeps every coalition the same length") {
    ReturnHistory h(3);
    CHECK(h.coalitions() == 7);
    const std::array<double, 7> r{0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07};
    h.append(r);
    h.append(r);
    CHECK(h.length() == 2);
    for (std::uint32_t m = 1; m <= 7; ++m) CHECK(h.of(CoalitionId(m)).size() == 2);
    CHECK(h.of(CoalitionId::of({0, 2}))[0] == 0.05);  // mask 5
    const std::array<double, 3> short_row{0.0, 0.0, 0.0};
    CHECK_THROWS_AS(h.append(short_row), Error);
    CHECK(h.length() == 2);
    const auto g = h.game(CharValueParams{});
    CHECK(g(CoalitionId::of({0})) == doctest::Approx(char_value(std::vector<double>{0.01, 0.01}, CharValueParams{})));
}
