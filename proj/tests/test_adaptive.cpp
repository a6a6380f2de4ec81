#include "generators.hpp"
#include "mrc/adaptive_weights.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace mrc;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("alpha schedule") {
    CHECK(alpha_schedule(0, 30) == 0.0);
    CHECK(alpha_schedule(30, 30) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(alpha_schedule(30, 30) == doctest::Approx(0.63212).epsilon(1e-5));
    CHECK(alpha_schedule(110, 30) >= 0.95);
    CHECK(alpha_schedule(110, 30) == doctest::Approx(0.9744).epsilon(1e-4));
    CHECK(alpha_schedule(1, 30) == doctest::Approx(0.0328).epsilon(1e-3));
    CHECK(burn_in_periods(0.95, 30) == 90);
    CHECK(alpha_schedule(89, 30) < 0.95);
    CHECK(alpha_schedule(90, 30) >= 0.95);
}

TEST_CASE("property: alpha is strictly increasing toward 1") {
    double prev = alpha_schedule(0, 30);
    for (int t = 1; t <= 1000; ++t) {
        const double a = alpha_schedule(t, 30);
        CHECK(a > prev);
        CHECK(a < 1.0);
        prev = a;
    }
    CHECK(prev > 1.0 - 1e-12);
}

TEST_CASE("bayes mix") {
    const Vector bar = vec({0.5, 0.25, 0.25});
    CHECK(bayes_mix(bar, 0.0).isApprox(Vector::Constant(3, 1.0 / 3.0)));
    CHECK(bayes_mix(bar, 1.0).isApprox(bar));
    const Vector w = bayes_mix(bar, 0.5);
    CHECK(w(0) == doctest::Approx(0.41667).epsilon(1e-4));
    CHECK(w(1) == doctest::Approx(0.29167).epsilon(1e-4));
    CHECK(w(2) == doctest::Approx(0.29167).epsilon(1e-4));
}

TEST_CASE("pairwise mix") {
    CHECK(pairwise_mix(vec({0.7, 0.7, 0.7}), 0.6).isApprox(Vector::Constant(3, 1.0 / 3.0)));
    CHECK(pairwise_mix(vec({2, 1, 1}), 1.0).isApprox(vec({0.5, 0.25, 0.25})));
    CHECK(pairwise_mix(vec({2, 1, 1}), 0.0).isApprox(Vector::Constant(3, 1.0 / 3.0)));
    CHECK(pairwise_mix(vec({-2, -1, -1}), 0.8).isApprox(Vector::Constant(3, 1.0 / 3.0)));
}

TEST_CASE("winner-takes-all override") {
    const Vector omega = vec({0.5, 0.3, 0.2});
    auto out = wta_override(omega, vec({2.0, 1.0, 1.0}), 1.8, 0.8);
    CHECK(out.active);
    CHECK(out.dominant == 0);
    CHECK(out.ratio == doctest::Approx(2.0));
    CHECK(out.weights.isApprox(vec({0.8, 0.12, 0.08})));

    out = wta_override(omega, vec({1.5, 1.0, 1.0}), 1.8, 0.8);
    CHECK_FALSE(out.active);
    CHECK(out.weights == omega);

    // negative Sharpes never fire
    out = wta_override(omega, vec({-0.5, -2.0, -3.0}), 1.8, 0.8);
    CHECK_FALSE(out.active);
    out = wta_override(omega, vec({3.0, 1.0, -1.0}), 1.8, 0.8);
    CHECK_FALSE(out.active);
}

TEST_CASE("rolling sharpe") {
    std::vector<double> r(29, 0.01);
    CHECK_FALSE(rolling_sharpe(r, 30).has_value());
    r.push_back(0.01);
    CHECK(*rolling_sharpe(r, 30) == 10.0);
    std::vector<double> alt;
    for (int i = 0; i < 30; ++i) alt.push_back(i % 2 ? 0.02 : 0.0);
    // mean 0.01, sample sd sqrt(30/29)*0.01
    CHECK(*rolling_sharpe(alt, 30) == doctest::Approx(std::sqrt(365.0) / std::sqrt(30.0 / 29.0)).epsilon(1e-12));
}

TEST_CASE("property: mixing stays on the simplex and ignores credit scale") {
    gen::Rng rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const Vector phi = gen::normals(rng, 3);
        const double alpha = alpha_schedule(rng.integer(0, 400), 30);
        const Vector w = bayes_mix(truncate_normalize(phi), alpha);
        CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((w.array() >= 0.0).all());
        const Vector w2 = bayes_mix(truncate_normalize<double>(phi * rng.uniform(0.01, 50.0)), alpha);
        CHECK((w2 - w).cwiseAbs().maxCoeff() < 1e-14);
        const Vector p = pairwise_mix(gen::normals(rng, 3), alpha);
        CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((p.array() >= 0.0).all());
    }
}

TEST_CASE("property: WTA is idempotent and preserves the simplex") {
    gen::Rng rng(32);
    int fired = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const Vector omega = gen::simplex(rng, 3);
        Vector rho(3);
        for (int i = 0; i < 3; ++i) rho(i) = rng.uniform(-1.0, 4.0);
        const auto once = wta_override(omega, rho, 1.8, 0.8);
        const auto twice = wta_override(once.weights, rho, 1.8, 0.8);
        CHECK((twice.weights - once.weights).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(once.weights.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((once.weights.array() >= 0.0).all());
        fired += once.active;
    }
    CHECK(fired > 0);
}

TEST_CASE("mixture config validation") {
    MixtureConfig c;
    CHECK_NOTHROW(c.validate(3));
    c.lambda = 0.0;
    CHECK_THROWS_AS(c.validate(3), Error);
    c = {};
    c.theta_wta = 1.0;
    CHECK_THROWS_AS(c.validate(3), Error);
    c = {};
    c.omega_wta = 0.3;
    CHECK_THROWS_AS(c.validate(3), Error);
}
