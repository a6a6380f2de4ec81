#include "generators.hpp"
#include "mrc/regime.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace mrc;

TEST_CASE("regime score") {
    const RegimeConfig cfg;
    CHECK(regime_score(0.0, 0.03, 0.01, cfg) == 0.0);
    CHECK(regime_score(0.05, 0.05, 0.01, cfg) == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
    CHECK(regime_score(0.05, 0.05, 0.01, cfg) == doctest::Approx(0.76159).epsilon(1e-5));
    bool att = false;
    CHECK(regime_score(0.05, 0.05, -0.4 * 0.05, cfg, &att) == doctest::Approx(0.38080).epsilon(1e-5));
    CHECK(att);
    // a small counter-move stays below the conflict threshold
    CHECK(regime_score(0.05, 0.05, -0.2 * 0.05, cfg, &att) == doctest::Approx(std::tanh(1.0)));
    CHECK_FALSE(att);
    // zero volatility saturates
    CHECK(regime_score(0.01, 0.0, 0.0, cfg) == 0.999);
    CHECK(regime_score(-0.01, 0.0, 0.0, cfg) == -0.999);
}

TEST_CASE("labels use strict thresholds") {
    CHECK(label(0.5, 0.3, -0.3) == Regime::Bull);
    CHECK(label(-0.5, 0.3, -0.3) == Regime::Bear);
    CHECK(label(0.30, 0.3, -0.3) == Regime::Volatile);
    CHECK(label(-0.30, 0.3, -0.3) == Regime::Volatile);
    CHECK(label(0.0, 0.3, -0.3) == Regime::Volatile);
}

TEST_CASE("multiplier anchors") {
    const auto a = MultiplierAnchors::defaults();
    CHECK(psi(a, 1.0)(0) == doctest::Approx(1.50));
    CHECK(psi(a, 0.5)(0) == doctest::Approx(1.35));
    CHECK(psi(a, 0.0)(1) == doctest::Approx(1.00));
    CHECK(psi(a, -1.0)(2) == doctest::Approx(1.50));
    // steepest segment is A3 between 0 and -1
    CHECK(a.max_slope() == doctest::Approx(0.7));
}

TEST_CASE("consensus") {
    const std::vector<Regime> same(3, Regime::Bear);
    CHECK(consensus_kappa(Vector::Constant(3, 1.0 / 3.0), same) == doctest::Approx(1.0));
    const Vector omega = (Vector(3) << 0.5, 0.3, 0.2).finished();
    const std::vector<Regime> votes{Regime::Bull, Regime::Bull, Regime::Bear};
    CHECK(consensus_kappa(omega, votes) == doctest::Approx(0.8));
    const std::vector<Regime> split{Regime::Bull, Regime::Volatile, Regime::Bear};
    CHECK(consensus_kappa(Vector::Constant(3, 1.0 / 3.0), split) == doctest::Approx(1.0 / 3.0));
    CHECK(plurality_regimes(Vector::Constant(3, 1.0 / 3.0), split).size() == 3);
    CHECK_THROWS_AS(consensus_kappa(omega, std::vector<Regime>{Regime::Bull}), Error);
}

TEST_CASE("apply multiplier") {
    const auto a = MultiplierAnchors::defaults();
    const Vector uniform = Vector::Constant(3, 1.0 / 3.0);
    const std::vector<Regime> split{Regime::Bull, Regime::Volatile, Regime::Bear};
    const Vector out = apply_multiplier(uniform, psi(a, 1.0), split, 1.0 / 3.0, 0.5);
    CHECK(out.isApprox((Vector(3) << 0.5, 0.3, 0.2).finished()));
    const Vector omega = (Vector(3) << 0.6, 0.3, 0.1).finished();
    CHECK(apply_multiplier(omega, Vector::Constant(3, 1.3), split, 1.0 / 3.0, 0.5).isApprox(omega));
    // full consensus boosts every voter equally, so omega is unchanged under flat psi
    const std::vector<Regime> same(3, Regime::Bull);
    CHECK(apply_multiplier(omega, Vector::Ones(3), same, 1.0, 0.5).isApprox(omega));
    // a majority of two gets amplified relative to the dissenter
    const std::vector<Regime> two{Regime::Bull, Regime::Bull, Regime::Bear};
    const Vector amp = apply_multiplier(uniform, Vector::Ones(3), two, 2.0 / 3.0, 0.5);
    CHECK(amp(0) == doctest::Approx(amp(1)));
    CHECK(amp(0) / amp(2) == doctest::Approx(1.25));
}

TEST_CASE("property: score range and label consistency") {
    gen::Rng rng(41);
    const RegimeConfig cfg;
    for (int trial = 0; trial < 2000; ++trial) {
        const double r30 = rng.uniform(-2.0, 2.0);
        const double s = rng.coin(0.05) ? 0.0 : rng.uniform(0.0, 0.2);
        const double r7 = rng.uniform(-1.0, 1.0);
        const auto st = make_regime_state(r30, s, r7, 0.1, cfg);
        CHECK(st.score > -1.0);
        CHECK(st.score < 1.0);
        CHECK((st.label == Regime::Bull) == (st.score > cfg.xi_plus));
        CHECK((st.label == Regime::Bear) == (st.score < cfg.xi_minus));
        CHECK(st.previous_score == 0.1);
    }
}

TEST_CASE("property: psi is Lipschitz with the largest anchor gap") {
    const auto a = MultiplierAnchors::defaults();
    // widest spread between any agent's anchors: 1.50 - 0.60
    const double L = (a.table.rowwise().maxCoeff() - a.table.rowwise().minCoeff()).maxCoeff();
    CHECK(L == doctest::Approx(0.9));
    CHECK(a.max_slope() <= L);
    for (int i = 0; i < 2000; ++i) {
        const double x = -1.0 + i * 1e-3;
        const double y = x + 1e-3;
        CHECK((psi(a, y) - psi(a, x)).cwiseAbs().maxCoeff() <= L * 1e-3 + 1e-12);
        CHECK((psi(a, x).array() > 0.0).all());
    }
}

TEST_CASE("property: apply_multiplier preserves the simplex and ignores psi scale") {
    gen::Rng rng(42);
    for (int trial = 0; trial < 500; ++trial) {
        const Vector omega = gen::simplex(rng, 3);
        std::vector<Regime> votes;
        for (int i = 0; i < 3; ++i) votes.push_back(kAllRegimes[static_cast<std::size_t>(rng.integer(0, 2))]);
        const Vector p = psi(MultiplierAnchors::defaults(), rng.uniform(-1.0, 1.0));
        const double kappa = consensus_kappa(omega, votes);
        const Vector out = apply_multiplier(omega, p, votes, kappa, 0.5);
        CHECK(out.sum() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK((out.array() >= 0.0).all());
        const Vector scaled = apply_multiplier(omega, p * rng.uniform(0.1, 10.0), votes, kappa, 0.5);
        CHECK((scaled - out).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("regime config validation") {
    RegimeConfig c;
    CHECK_NOTHROW(c.validate());
    c.xi_plus = -0.1;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.saturation = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
}
