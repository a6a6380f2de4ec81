#pragma once

// Exponentially weighted estimators over coalition return histories and the
// composite characteristic function built from them.

#include "mrc/shapley.hpp"
#include "mrc/types.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace mrc {

// w_tau = exp(-(t - tau) / h) for tau = 1..t; the newest observation weighs 1.
template <typename Scalar = double>
VectorX<Scalar> ewp_weights(Eigen::Index t, Scalar h) {
    if (t < 1) throw Error("ewp_weights requires t >= 1");
    if (!(h > Scalar(0))) throw Error("ewp decay period must be positive");
    VectorX<Scalar> w(t);
    for (Eigen::Index tau = 1; tau <= t; ++tau) w(tau - 1) = std::exp(-Scalar(t - tau) / h);
    return w;
}

template <typename Scalar = double>
struct Moments {
    Scalar mean;
    Scalar stddev;
};

// Weighted mean and (population) weighted standard deviation of a history.
// An infinite h gives equal weights.
template <typename Scalar = double>
Moments<Scalar> ewp_moments(std::span<const Scalar> history, Scalar h) {
    if (history.empty()) throw Error("cold ledger: no return history for coalition");
    const auto n = static_cast<Eigen::Index>(history.size());
    const Eigen::Map<const VectorX<Scalar>> r(history.data(), n);
    const VectorX<Scalar> w = std::isinf(h) ? VectorX<Scalar>::Ones(n) : ewp_weights<Scalar>(n, h);
    const Scalar wsum = w.sum();
    const Scalar mean = w.dot(r) / wsum;
    const Scalar var = (w.array() * (r.array() - mean).square()).sum() / wsum;
    return {mean, std::sqrt(std::max(var, Scalar(0)))};
}

// Share of total EWP weight carried by the first n0 observations at time t.
template <typename Scalar = double>
Scalar early_influence_ratio(Eigen::Index n0, Eigen::Index t, Scalar h) {
    const VectorX<Scalar> w = ewp_weights<Scalar>(t, h);
    return w.head(n0).sum() / w.sum();
}

struct CharValueParams {
    double decay_h = 252.0;
    double gamma_rho = 0.4;
    double gamma_mu = 0.6;
    double sharpe_cap = 10.0;
    double annualization = 365.0;
    double sigma_floor = 1e-8;
};

// v(S) = gamma_rho * sqrt(A) * mu / sigma + gamma_mu * A * mu.
// A degenerate sigma replaces the Sharpe term with sign(mu) * cap; an empty
// history is worth zero.
double char_value(std::span<const double> history, const CharValueParams& p);
double char_value_from_moments(double mean, double stddev, const CharValueParams& p);

// Append-only per-coalition return histories sharing a common length.
class ReturnHistory {
public:
    explicit ReturnHistory(int n_players = 3);

    int players() const { return n_players_; }
    std::size_t length() const { return histories_.front().size(); }
    std::size_t coalitions() const { return histories_.size(); }

    // One return per nonempty coalition, indexed by mask - 1.
    void append(std::span<const double> returns_by_mask);

    std::span<const double> of(CoalitionId s) const;

    CharacteristicGame<double> game(const CharValueParams& p) const;

private:
    int n_players_;
    std::vector<std::vector<double>> histories_;
};

}  // namespace mrc
