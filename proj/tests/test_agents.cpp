#include "generators.hpp"
#include "mrc/agents.hpp"
#include "mrc/council.hpp"
#include "mrc/synthetic.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace mrc;

namespace {

MarketSnapshot flat_snapshot(Eigen::Index k) {
    PriceTable p;
    for (Eigen::Index a = 0; a < k; ++a) p.assets.push_back("X" + std::to_string(a));
    p.assets[0] = "BTC";
    for (int i = 0; i < 40; ++i) p.dates.push_back(parse_date("2024-01-01") + std::chrono::days(i));
    p.close.resize(40, k);
    for (int i = 0; i < 40; ++i) p.close.row(i).setConstant(100.0 * std::exp(0.01 * i + 0.02 * std::sin(i)));
    return snapshot(p, {}, 39);
}

AgentDecision decision(Vector w, double c, Regime vote) { return {Portfolio{std::move(w), c}, vote, ""}; }

}  // namespace

TEST_CASE("softmax and votes") {
    CHECK(softmax(Vector::Constant(4, 2.5)).isApprox(Vector::Constant(4, 0.25)));
    const Vector s = softmax((Vector(2) << 0.0, std::log(3.0)).finished());
    CHECK(s(0) == doctest::Approx(0.25));
    CHECK(softmax((Vector(2) << 1000.0, 0.0).finished()).allFinite());
    CHECK(vote_from_signal(0.31, 0.3) == Regime::Bull);
    CHECK(vote_from_signal(0.30, 0.3) == Regime::Volatile);
    CHECK(vote_from_signal(-0.31, 0.3) == Regime::Bear);
}

TEST_CASE("A1 outputs equal weights when assets are indistinguishable") {
    const ReferencePolicies pol;
    const auto d = pol.decide(0, flat_snapshot(5));
    CHECK((d.portfolio.assets.array() - d.portfolio.assets.mean()).abs().maxCoeff() < 1e-15);
    CHECK(d.portfolio.feasible(0.4, 0.3));
}

TEST_CASE("A2 falls back to equal weight when on-chain data is missing") {
    const ReferencePolicies pol;
    const auto snap = flat_snapshot(5);
    REQUIRE_FALSE(snap.has_onchain);
    const auto d = pol.decide(1, snap);
    CHECK(d.portfolio.cash == doctest::Approx(0.15));
    CHECK(d.portfolio.assets.isApprox(Vector::Constant(5, 0.17)));
    CHECK(d.vote == Regime::Volatile);
    CHECK(d.rationale.find("unavailable") != std::string::npos);
}

TEST_CASE("A3 goes to maximal cash when the macro picture is fully risk-off") {
    const ReferencePolicies pol;
    auto snap = flat_snapshot(4);
    snap.macro_z = {{"VIX", 1e3}};
    CHECK(pol.risk_on(snap) == 0.0);
    const auto d = pol.decide(2, snap);
    CHECK(d.portfolio.cash == doctest::Approx(0.30));
    CHECK(d.portfolio.assets.isApprox(Vector::Constant(4, 0.175)));
    CHECK(d.vote == Regime::Bear);
    snap.macro_z = {{"sentiment", 1e3}};
    CHECK(pol.risk_on(snap) == 1.0);
    CHECK(pol.decide(2, snap).portfolio.cash == 0.0);
}

TEST_CASE("unknown agents and policy sets are rejected") {
    const ReferencePolicies pol;
    CHECK_THROWS_AS(pol.decide(3, flat_snapshot(3)), Error);
    CHECK_THROWS_AS(pol.name(-1), Error);
    AgentConfig c;
    c.policy_set = "llm";
    CHECK_THROWS_WITH_AS(make_policy_set(c), doctest::Contains("policy_set"), Error);
}

TEST_CASE("debate") {
    const AgentConfig cfg;
    const auto a = decision((Vector(2) << 1, 0).finished(), 0.0, Regime::Bull);
    const auto b = decision((Vector(2) << 0, 1).finished(), 0.0, Regime::Bear);
    const auto d = debate(a, b, cfg);
    CHECK(d.portfolio.assets(0) == doctest::Approx(0.375));
    CHECK(d.portfolio.assets(1) == doctest::Approx(0.375));
    CHECK(d.portfolio.cash == doctest::Approx(0.25));
    CHECK(d.vote == Regime::Volatile);

    const auto same = decision((Vector(3) << 0.3, 0.3, 0.3).finished(), 0.1, Regime::Bull);
    const auto e = debate(same, same, cfg);
    CHECK(e.portfolio == same.portfolio);
    CHECK(e.vote == Regime::Bull);
}

TEST_CASE("grand readout") {
    const AgentConfig cfg;
    gen::Rng rng(81);
    const auto base = decision((Vector(4) << 0.2, 0.3, 0.25, 0.15).finished(), 0.1, Regime::Bear);
    std::vector<AgentDecision> s1(3, base), s2(3, base);
    auto r = ShapleyReport::uniform(3);
    const auto same = grand_readout(s1, s2, r, cfg);
    CHECK((same.portfolio.stacked() - base.portfolio.stacked()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(same.vote == Regime::Bear);

    for (auto& d : s1) d = {gen::feasible_portfolio(rng, 4), Regime::Bull, ""};
    for (auto& d : s2) d = {gen::feasible_portfolio(rng, 4), Regime::Bear, ""};
    s1[2].vote = Regime::Volatile;
    const auto mean = grand_readout(s1, s2, r, cfg);
    Vector m1 = Vector::Zero(5), m2 = Vector::Zero(5);
    for (const auto& d : s1) m1 += d.portfolio.stacked() / 3.0;
    for (const auto& d : s2) m2 += d.portfolio.stacked() / 3.0;
    CHECK((mean.portfolio.stacked() - 0.5 * (m1 + m2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(mean.vote == Regime::Bull);

    // point mass on A1 with the Stage-2 half zeroed out by identical Stage-2 inputs
    r.omega = (Vector(3) << 1, 0, 0).finished();
    std::vector<AgentDecision> s2same(3, s1[0]);
    const auto pm = grand_readout(s1, s2same, r, cfg);
    CHECK((pm.portfolio.stacked() - s1[0].portfolio.stacked()).cwiseAbs().maxCoeff() < 1e-12);

    s1[0].vote = Regime::Bull;
    s1[1].vote = Regime::Bear;
    s1[2].vote = Regime::Volatile;
    CHECK(grand_readout(s1, s2, r, cfg).vote == Regime::Volatile);
    CHECK_THROWS_AS(grand_readout(std::span(s1).first(2), s2, ShapleyReport::uniform(3), cfg), Error);
}

TEST_CASE("property: decisions are feasible and deterministic on the synthetic data") {
    const auto data = make_synthetic({});
    const ReferencePolicies pol;
    const AgentConfig cfg;
    gen::Rng rng(82);
    for (int trial = 0; trial < 60; ++trial) {
        const auto t = static_cast<Eigen::Index>(rng.integer(0, static_cast<int>(data.prices.periods()) - 1));
        const auto snap = snapshot(data.prices, data.features, t);
        std::vector<AgentDecision> s1;
        for (int id = 0; id < 3; ++id) {
            const auto d = pol.decide(id, snap);
            CHECK(d == pol.decide(id, snap));
            CHECK(project_constraints(d.portfolio, 0.4, 0.3) == d.portfolio);
            s1.push_back(d);
        }
        // pairs in any evaluation order give the same three portfolios
        const std::vector<AgentDecision> s2{debate(s1[0], s1[1], cfg), debate(s1[0], s1[2], cfg), debate(s1[1], s1[2], cfg)};
        const std::vector<AgentDecision> s2b{debate(s1[1], s1[0], cfg), debate(s1[2], s1[0], cfg), debate(s1[2], s1[1], cfg)};
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK((s2[i].portfolio.stacked() - s2b[i].portfolio.stacked()).cwiseAbs().maxCoeff() < 1e-15);
            CHECK(project_constraints(s2[i].portfolio, 0.4, 0.3) == s2[i].portfolio);
        }
        auto report = ShapleyReport::uniform(3);
        report.omega = gen::simplex(rng, 3);
        report.pairwise = gen::simplex(rng, 3);
        const auto g = grand_readout(s1, s2, report, cfg);
        CHECK(g == grand_readout(s1, s2, report, cfg));
        CHECK(project_constraints(g.portfolio, 0.4, 0.3) == g.portfolio);
    }
}

TEST_CASE("agent config validation") {
    AgentConfig c;
    CHECK_NOTHROW(c.validate());
    c.vote_threshold = 1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c = {};
    c.debate_caution = -0.1;
    CHECK_THROWS_AS(c.validate(), Error);
}
