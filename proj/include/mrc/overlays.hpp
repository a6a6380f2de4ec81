#pragma once

// Seven-stage risk overlay cascade. Every stage is a continuous transform of
// its driving signal; only the momentum tilt changes total mass, and the
// final projection restores the simplex and the caps.
//
// Lipschitz bounds (L1 change of the portfolio per unit of signal, for a
// unit-mass input) used by the tests:
//   momentum   dz: 0.29   dxi: 0.35
//   dominance  dDelta: 2 * c_d / tau_d            (6.0 with defaults)
//   bear tilt  d(delta_oc): 2 * 0.08 / 1.5        (0.11), away from the 0.005 gate
//   cash tgt   dxi: 2 * 0.17 / 0.12               (2.84)
//   transition dxi: 2 * c_trans / tau_trans       (2.8)
//   drawdown   dDD: 2 * nu / tau_dd               (5.34)

#include "mrc/market_data.hpp"
#include "mrc/regime.hpp"
#include "mrc/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mrc {

struct RoleConfig {
    std::string btc = "BTC";
    std::vector<std::string> dominance_donors{"ETH", "ADA", "LINK", "DOGE", "XLM", "XRP", "BCH"};
    std::vector<std::pair<std::string, double>> dominance_recipients{{"BTC", 0.60}, {"TRX", 0.25}, {"ZEC", 0.15}};
    std::vector<std::string> alt_season_sources{"BTC", "TRX"};
    std::vector<std::string> alt_season_recipients{"ADA", "XLM", "DOGE", "XRP", "BCH", "ETH"};
};

struct OverlayConfig {
    double momentum_base = 0.08;
    double momentum_slope = 0.35;
    double momentum_zcap = 1.5;

    double dominance_tau = 0.15;
    double dominance_coef_volatile = 0.45;
    double dominance_coef_bear = 0.30;
    double dominance_coef_alt = 0.20;
    double dominance_recipient_cap = 0.30;

    double btc_floor = 0.18;

    double bear_tilt_max = 0.08;
    double bear_tilt_bandwidth = 1.5;
    double bear_tilt_activation = 0.005;
    double bear_tilt_btc_cap = 0.30;

    double cash_target_base = 0.08;
    double cash_target_amp = 0.17;
    double cash_target_bandwidth = 0.12;
    double bull_cash_cap = 0.08;

    double transition_depth = 0.35;
    double transition_tau = 0.25;

    double dd_tau = 0.15;
    double dd_nu = 0.40;
    double dd_cash_base = 0.08;
    double dd_cash_slope = 0.22;

    double w_max = 0.40;
    double c_max = 0.30;

    RoleConfig roles;

    void validate() const;
};

// Role names resolved against a concrete asset universe. Absent assets drop out.
struct AssetRoles {
    std::optional<Eigen::Index> btc;
    std::vector<Eigen::Index> donors;
    std::vector<std::pair<Eigen::Index, double>> recipients;  // shares renormalised over present assets
    std::vector<Eigen::Index> alt_sources;
    std::vector<Eigen::Index> alt_recipients;
    Eigen::Index asset_count = 0;

    static AssetRoles resolve(const RoleConfig& roles, const std::vector<std::string>& assets);
    std::vector<Eigen::Index> altcoins() const;
};

struct OverlayStep {
    std::string name;
    Portfolio pre;
    Portfolio post;
    std::vector<std::pair<std::string, double>> signals;
    bool active = false;
    std::string note;

    friend bool operator==(const OverlayStep&, const OverlayStep&) = default;
};

struct OverlayTrace {
    std::vector<OverlayStep> steps;

    bool chain_consistent() const;
    friend bool operator==(const OverlayTrace&, const OverlayTrace&) = default;
};

struct OverlaySignals {
    Vector z;                          // cross-sectional 30-day return z-scores
    double btc_minus_alts = 0.0;       // 30-day BTC minus EW altcoin return
    std::optional<double> onchain_diff;
    RegimeState regime;
    double drawdown = 0.0;             // from the rolling equity peak, in [0, 1)

    static OverlaySignals from(const MarketSnapshot& snap, const RegimeState& regime, double drawdown);
};

// Per-stage transforms. `note`, when given, receives a short explanation.
double momentum_strength(double xi, const OverlayConfig& cfg);
Portfolio momentum_overlay(const Portfolio& p, const Vector& z, double xi, const OverlayConfig& cfg);

Portfolio dominance_overlay(const Portfolio& p, double btc_minus_alts, Regime regime, const AssetRoles& roles,
                            const OverlayConfig& cfg, std::string* note = nullptr);

Portfolio btc_floor(const Portfolio& p, Regime regime, const AssetRoles& roles, const OverlayConfig& cfg);

double bear_tilt_size(double onchain_diff, const OverlayConfig& cfg);
Portfolio bear_onchain_tilt(const Portfolio& p, Regime regime, std::optional<double> onchain_diff,
                            const AssetRoles& roles, const OverlayConfig& cfg, std::string* note = nullptr);

// 0.08 + 0.17 exp(-|xi| / 0.12) with the default parameters.
double volatile_cash_target_level(double xi, const OverlayConfig& cfg);
Portfolio volatile_cash_target(const Portfolio& p, double xi, Regime regime, const OverlayConfig& cfg);

double transition_scale(double xi_prev, double xi_now, const OverlayConfig& cfg);
Portfolio transition_buffer(const Portfolio& p, double xi_prev, double xi_now, const OverlayConfig& cfg);

double drawdown_scale(double drawdown, double xi, const OverlayConfig& cfg);
double drawdown_cash_cap(double xi, const OverlayConfig& cfg);
Portfolio drawdown_protect(const Portfolio& p, double drawdown, double xi, const OverlayConfig& cfg);

struct CascadeResult {
    Portfolio portfolio;
    OverlayTrace trace;
};

// Applies the seven overlays in order, then projects onto the constraint set.
CascadeResult run_cascade(const Portfolio& council, const OverlaySignals& signals, const AssetRoles& roles,
                          const OverlayConfig& cfg);

}  // namespace mrc
