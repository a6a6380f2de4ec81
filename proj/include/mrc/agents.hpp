#pragma once

// Deterministic stand-ins for the three specialist agents, the pairwise
// debate and the grand-coalition readout. The interface is the contract; a
// different policy set can be plugged in without touching the council.

#include "mrc/market_data.hpp"
#include "mrc/types.hpp"

#include <array>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mrc {

struct AgentDecision {
    Portfolio portfolio;
    Regime vote = Regime::Volatile;
    std::string rationale;

    friend bool operator==(const AgentDecision&, const AgentDecision&) = default;
};

// What the agents see of the ledger at decision time.
struct ShapleyReport {
    Vector omega;                       // agent weights
    Vector pairwise;                    // p in (12, 13, 23) order
    std::array<double, 7> values{};     // v(S) in canonical order
    Vector rolling_sharpe;              // NaN until the window fills
    bool wta_active = false;
    int dominant = -1;

    static ShapleyReport uniform(int n_agents);
};

struct AgentConfig {
    std::string policy_set = "reference";
    double a1_cash_base = 0.08;
    double a1_cash_amp = 0.17;
    double a2_cash = 0.15;
    double vote_threshold = 0.30;
    double debate_caution = 0.25;
    // Macro columns whose rise signals risk-off; all other macro columns count as risk-on.
    std::vector<std::string> risk_off_features{"VIX", "DXY", "real_yield"};
    double w_max = 0.40;
    double c_max = 0.30;

    void validate() const;
};

class AgentPolicy {
public:
    virtual ~AgentPolicy() = default;
    virtual int agents() const = 0;
    virtual std::string_view name(int id) const = 0;
    // Throws for an unknown id.
    virtual AgentDecision decide(int id, const MarketSnapshot& snap) const = 0;
};

// A1 technical, A2 on-chain, A3 macro.
class ReferencePolicies final : public AgentPolicy {
public:
    explicit ReferencePolicies(AgentConfig cfg = {});

    int agents() const override { return 3; }
    std::string_view name(int id) const override;
    AgentDecision decide(int id, const MarketSnapshot& snap) const override;

    // Signals behind each policy, exposed for tests and traces.
    static Vector technical_scores(const MarketSnapshot& snap);
    double risk_on(const MarketSnapshot& snap) const;

    const AgentConfig& config() const { return cfg_; }

private:
    AgentConfig cfg_;
};

std::unique_ptr<AgentPolicy> make_policy_set(const AgentConfig& cfg);

// exp(x - max) normalised; uniform for an empty or all-equal input.
Vector softmax(const Vector& x);

// Regime vote from a signal in [-1, 1] with exclusive thresholds.
Regime vote_from_signal(double signal, double threshold);

// Average of the two portfolios, then disagreement caution moves
// caution * D of the long mass to cash, D = sum_k |w_ik - w_jk| / 2.
AgentDecision debate(const AgentDecision& a, const AgentDecision& b, const AgentConfig& cfg);

// Half omega-weighted Stage-1 mix, half p-weighted Stage-2 mix.
// Vote is the Stage-1 plurality, volatile on ties.
AgentDecision grand_readout(std::span<const AgentDecision> stage1, std::span<const AgentDecision> stage2,
                            const ShapleyReport& report, const AgentConfig& cfg);

}  // namespace mrc
