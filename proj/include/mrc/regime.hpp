#pragma once

#include "mrc/types.hpp"

#include <span>
#include <vector>

namespace mrc {

struct RegimeConfig {
    double xi_plus = 0.30;
    double xi_minus = -0.30;
    double attenuation_factor = 0.5;
    double attenuation_ratio = 0.30;  // |r_7d| above this share of |r_30d| counts as a conflict
    double saturation = 0.999;        // |xi| used when the 30-day volatility is zero
    double consensus_gain = 0.5;

    void validate() const;
};

// Per-agent multiplier anchors at xi = +1, 0, -1 (rows: agents).
struct MultiplierAnchors {
    Eigen::Matrix<double, Eigen::Dynamic, 3> table;

    static MultiplierAnchors defaults();
    int agents() const { return static_cast<int>(table.rows()); }
    double max_slope() const;
};

struct RegimeState {
    double score = 0.0;
    Regime label = Regime::Volatile;
    double previous_score = 0.0;
    bool attenuated = false;

    friend bool operator==(const RegimeState&, const RegimeState&) = default;
};

// tanh(r_30d / sigma_30d), halved when the 7-day move contradicts the trend by
// more than attenuation_ratio of its size.
double regime_score(double r_30d, double sigma_30d, double r_7d, const RegimeConfig& cfg, bool* attenuated = nullptr);

// Thresholds are exclusive: a score sitting exactly on one is volatile.
Regime label(double xi, double xi_plus, double xi_minus);

RegimeState make_regime_state(double r_30d, double sigma_30d, double r_7d, double previous_score,
                              const RegimeConfig& cfg);

// Piecewise-linear interpolation between the -1, 0, +1 anchors.
Vector psi(const MultiplierAnchors& anchors, double xi);

// Largest omega mass behind a single regime vote.
double consensus_kappa(const Vector& omega, std::span<const Regime> votes);

// Regimes whose omega mass equals kappa.
std::vector<Regime> plurality_regimes(const Vector& omega, std::span<const Regime> votes);

// omega_i * psi_i renormalised, with plurality voters' multipliers scaled by
// 1 + gain * (kappa - 1/N) / (1 - 1/N).
Vector apply_multiplier(const Vector& omega, const Vector& psi_values, std::span<const Regime> votes, double kappa,
                        double gain);

}  // namespace mrc
