#pragma once

#include "mrc/types.hpp"

#include <optional>
#include <span>

namespace mrc {

struct MixtureConfig {
    double lambda = 30.0;      // cold-start concentration, days
    int n_win = 30;            // rolling-Sharpe window for the override
    double theta_wta = 1.8;    // dominance ratio threshold
    double omega_wta = 0.80;   // share handed to the dominant agent

    void validate(int n_agents) const;
};

struct WeightState {
    Vector agent;     // omega, on the simplex
    Vector pairwise;  // p_ij in (12, 13, 23) order
    long periods = 0;
    bool wta_active = false;
    int dominant = -1;

    static WeightState uniform(int n_agents);
};

// alpha(t) = 1 - exp(-t / lambda).
double alpha_schedule(double t, double lambda);

// Smallest t with alpha(t) >= target, i.e. ceil(-lambda * ln(1 - target)).
long burn_in_periods(double target_alpha, double lambda);

// omega = alpha * weights + (1 - alpha) / N.
Vector bayes_mix(const Vector& truncated_weights, double alpha);

// Pairwise values (v12, v13, v23) truncated, normalised and mixed with the uniform prior.
Vector pairwise_mix(const Vector& pair_values, double alpha);

// Annualised Sharpe of the last n_win returns (sample std). Returns nullopt
// when fewer than n_win observations exist. A flat window yields
// sign(mean) * cap.
std::optional<double> rolling_sharpe(std::span<const double> returns, int n_win, double annualization = 365.0,
                                     double cap = 10.0);

struct WtaOutcome {
    Vector weights;
    bool active = false;
    int dominant = -1;
    double ratio = 0.0;
};

// Selective winner-takes-all: fires when the leader's rolling Sharpe divided
// by the mean of the others reaches theta, both strictly positive.
WtaOutcome wta_override(const Vector& omega, const Vector& rolling_sharpes, double theta_wta, double omega_wta);

}  // namespace mrc
