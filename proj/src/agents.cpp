#include "mrc/agents.hpp"

#include "mrc/council.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mrc {

ShapleyReport ShapleyReport::uniform(int n_agents) {
    ShapleyReport r;
    r.omega = Vector::Constant(n_agents, 1.0 / n_agents);
    const int pairs = n_agents * (n_agents - 1) / 2;
    r.pairwise = Vector::Constant(pairs, 1.0 / pairs);
    r.rolling_sharpe = Vector::Constant(n_agents, std::numeric_limits<double>::quiet_NaN());
    return r;
}

void AgentConfig::validate() const {
    if (policy_set != "reference") throw Error("unknown agents.policy_set: " + policy_set);
    if (!(a1_cash_base >= 0.0 && a1_cash_base + a1_cash_amp <= 1.0 && a1_cash_amp >= 0.0))
        throw Error("A1 cash range must lie in [0, 1]");
    if (!(a2_cash >= 0.0 && a2_cash <= 1.0)) throw Error("agents.a2_cash must lie in [0, 1]");
    if (!(vote_threshold > 0.0 && vote_threshold < 1.0)) throw Error("agents.vote_threshold must lie in (0, 1)");
    if (!(debate_caution >= 0.0 && debate_caution <= 1.0)) throw Error("agents.debate_caution must lie in [0, 1]");
}

Vector softmax(const Vector& x) {
    if (x.size() == 0) return x;
    const Eigen::ArrayXd e = (x.array() - x.maxCoeff()).exp();
    return (e / e.sum()).matrix();
}

Regime vote_from_signal(double signal, double threshold) {
    if (signal > threshold) return Regime::Bull;
    if (signal < -threshold) return Regime::Bear;
    return Regime::Volatile;
}

ReferencePolicies::ReferencePolicies(AgentConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

std::string_view ReferencePolicies::name(int id) const {
    switch (id) {
        case 0: return "technical";
        case 1: return "onchain";
        case 2: return "macro";
    }
    throw Error("unknown agent id " + std::to_string(id));
}

Vector ReferencePolicies::technical_scores(const MarketSnapshot& snap) {
    const Eigen::Index k = snap.log30.size();
    Vector s = Vector::Zero(k);
    const double scale = std::sqrt(30.0);
    for (Eigen::Index a = 0; a < k; ++a)
        if (snap.vol30(a) > 0.0) s(a) = snap.log30(a) / (snap.vol30(a) * scale);
    return s;
}

double ReferencePolicies::risk_on(const MarketSnapshot& snap) const {
    if (snap.macro_z.empty()) return 0.5;
    double sum = 0.0;
    for (const auto& [name, z] : snap.macro_z) {
        const bool off = std::find(cfg_.risk_off_features.begin(), cfg_.risk_off_features.end(), name) !=
                         cfg_.risk_off_features.end();
        sum += off ? -z : z;
    }
    return 0.5 * (1.0 + std::tanh(sum / static_cast<double>(snap.macro_z.size())));
}

AgentDecision ReferencePolicies::decide(int id, const MarketSnapshot& snap) const {
    const Eigen::Index k = snap.ret30.size();
    AgentDecision d;
    Portfolio raw;
    switch (id) {
        case 0: {
            const Vector s = technical_scores(snap);
            const double momentum = s.mean();
            const double cash = cfg_.a1_cash_base + cfg_.a1_cash_amp * (1.0 - std::tanh(std::max(0.0, momentum)));
            raw = {(1.0 - cash) * softmax(s), cash};
            d.vote = vote_from_signal(std::tanh(momentum), cfg_.vote_threshold);
            d.rationale = "mean momentum " + std::to_string(momentum);
            break;
        }
        case 1: {
            if (!snap.has_onchain) {
                raw = Portfolio::equal_weight(k, cfg_.a2_cash);
                d.vote = Regime::Volatile;
                d.rationale = "on-chain features unavailable";
                break;
            }
            Vector z = snap.onchain_z;
            double sum = 0.0;
            int n = 0;
            for (Eigen::Index a = 0; a < k; ++a) {
                if (std::isnan(z(a))) {
                    z(a) = 0.0;
                    continue;
                }
                sum += z(a);
                ++n;
            }
            const double mean = n > 0 ? sum / n : 0.0;
            raw = {(1.0 - cfg_.a2_cash) * softmax(z), cfg_.a2_cash};
            d.vote = vote_from_signal(std::tanh(mean), cfg_.vote_threshold);
            d.rationale = "mean on-chain z " + std::to_string(mean);
            break;
        }
        case 2: {
            const double r = risk_on(snap);
            raw = Portfolio::equal_weight(k, cfg_.c_max * (1.0 - r));
            d.vote = vote_from_signal(2.0 * r - 1.0, cfg_.vote_threshold);
            d.rationale = "risk-on " + std::to_string(r);
            break;
        }
        default: throw Error("unknown agent id " + std::to_string(id));
    }
    d.portfolio = project_constraints(raw, cfg_.w_max, cfg_.c_max);
    return d;
}

std::unique_ptr<AgentPolicy> make_policy_set(const AgentConfig& cfg) {
    if (cfg.policy_set == "reference") return std::make_unique<ReferencePolicies>(cfg);
    throw Error("unknown agents.policy_set: " + cfg.policy_set);
}

AgentDecision debate(const AgentDecision& a, const AgentDecision& b, const AgentConfig& cfg) {
    if (a.portfolio.size() != b.portfolio.size()) throw Error("portfolio dimension mismatch");
    const double disagreement = 0.5 * (a.portfolio.assets - b.portfolio.assets).cwiseAbs().sum();
    Portfolio avg{0.5 * (a.portfolio.assets + b.portfolio.assets), 0.5 * (a.portfolio.cash + b.portfolio.cash)};
    const double moved = cfg.debate_caution * disagreement * avg.long_mass();
    if (moved > 0.0) {
        avg.assets *= 1.0 - cfg.debate_caution * disagreement;
        avg.cash += moved;
    }
    AgentDecision d;
    d.portfolio = project_constraints(avg, cfg.w_max, cfg.c_max);
    d.vote = a.vote == b.vote ? a.vote : Regime::Volatile;
    d.rationale = "disagreement " + std::to_string(disagreement);
    return d;
}

AgentDecision grand_readout(std::span<const AgentDecision> stage1, std::span<const AgentDecision> stage2,
                            const ShapleyReport& report, const AgentConfig& cfg) {
    if (stage1.empty() || static_cast<Eigen::Index>(stage1.size()) != report.omega.size() ||
        static_cast<Eigen::Index>(stage2.size()) != report.pairwise.size())
        throw Error("grand readout needs every coalition output");
    const Eigen::Index dim = stage1.front().portfolio.size();
    Vector s1 = Vector::Zero(dim + 1), s2 = Vector::Zero(dim + 1);
    for (std::size_t i = 0; i < stage1.size(); ++i)
        s1 += report.omega(static_cast<Eigen::Index>(i)) * stage1[i].portfolio.stacked();
    for (std::size_t i = 0; i < stage2.size(); ++i)
        s2 += report.pairwise(static_cast<Eigen::Index>(i)) * stage2[i].portfolio.stacked();

    std::array<int, 3> counts{};
    for (const auto& d : stage1) ++counts[static_cast<std::size_t>(d.vote)];
    const int top = *std::max_element(counts.begin(), counts.end());
    Regime vote = Regime::Volatile;
    if (std::count(counts.begin(), counts.end(), top) == 1)
        vote = static_cast<Regime>(std::max_element(counts.begin(), counts.end()) - counts.begin());

    AgentDecision d;
    d.portfolio = project_constraints(Portfolio::from_stacked(0.5 * s1 + 0.5 * s2), cfg.w_max, cfg.c_max);
    d.vote = vote;
    d.rationale = "readout over " + std::to_string(stage1.size() + stage2.size()) + " coalitions";
    return d;
}

}  // namespace mrc
