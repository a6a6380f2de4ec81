#pragma once

// The online loop: per-period inference, return realisation, ledger update
// and cost accounting.

#include "mrc/agents.hpp"
#include "mrc/config.hpp"
#include "mrc/ewp.hpp"
#include "mrc/market_data.hpp"
#include "mrc/metrics.hpp"
#include "mrc/shapley.hpp"
#include "mrc/trace.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace mrc {

// Mask-minus-one slots of the seven coalitions in canonical (1, 2, 3, 12, 13, 23, 123) order.
inline constexpr std::array<int, 7> kCanonicalSlot{0, 1, 3, 2, 4, 5, 6};

struct ShapleyLedger {
    ReturnHistory history{3};
    WeightState weights = WeightState::uniform(3);
    CharacteristicGame<double> game{3};
    ShapleyCredit<double> credit{Vector::Zero(3), Vector::Zero(3), Vector::Constant(3, 1.0 / 3.0)};
    std::vector<std::optional<double>> rolling_sharpe = std::vector<std::optional<double>>(3);

    long periods() const { return static_cast<long>(history.length()); }
    ShapleyReport report() const;
};

// Appends one return per coalition (indexed by mask - 1), then recomputes
// v(S), the closed-form credit, the Bayesian mixtures and the WTA override.
void ledger_update(ShapleyLedger& ledger, std::span<const double> returns_by_mask, const RunConfig& cfg);

// Loop state carried between periods.
struct BacktestState {
    ShapleyLedger ledger;
    std::optional<Portfolio> previous;  // executed portfolio of the last period
    double previous_score = 0.0;
    std::vector<double> equity{1.0};    // net equity, starting at 1

    double drawdown(int window) const;
};

struct StepResult {
    TraceRecord record;
    std::array<Portfolio, 7> coalition_portfolios;  // canonical order, raw
    std::optional<Vector> next_returns;             // asset returns t -> t+1 when available
};

// One decision period. Realises coalition returns and updates the ledger when
// a next-day price exists; cost and equity accounting stays with run().
StepResult step(BacktestState& state, const PriceTable& prices, const FeatureTable& aligned_features,
                Eigen::Index t, const AgentPolicy& policy, const RunConfig& cfg);

struct BacktestResult {
    std::vector<std::string> assets;
    std::vector<Date> dates;              // one per decision period
    std::vector<Portfolio> executed;      // one per decision period
    std::vector<double> gross, turnover, cost, returns, benchmark;  // one per realised period
    std::vector<double> equity;           // net equity after each realised period
    std::array<std::vector<double>, 7> coalition_returns;  // canonical order
    Metrics metrics;
    Metrics benchmark_metrics;
    std::array<Metrics, 7> coalition_metrics;
    TraceFile trace;

    double total_cost() const;
};

BacktestResult run(const PriceTable& prices, const FeatureTable& features, const RunConfig& cfg);

// Turnover against holdings drifted by the realised returns:
// sum_k |w_k - w~_k| + |c - c~|.
double drifted_turnover(const Portfolio& target, const Portfolio& held, const Vector& asset_returns);
Portfolio drift(const Portfolio& held, const Vector& asset_returns);

void write_summary(const std::filesystem::path& path, const BacktestResult& result, const RunConfig& cfg);
void write_equity_csv(const std::filesystem::path& path, const BacktestResult& result);

}  // namespace mrc
