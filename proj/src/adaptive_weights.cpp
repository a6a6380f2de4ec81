#include "mrc/adaptive_weights.hpp"

#include "mrc/shapley.hpp"

#include <cmath>

namespace mrc {

void MixtureConfig::validate(int n_agents) const {
    if (!(lambda > 0.0)) throw Error("lambda must be positive");
    if (n_win < 1) throw Error("n_win must be at least 1");
    if (!(theta_wta > 1.0)) throw Error("theta_wta must exceed 1");
    if (!(omega_wta > 1.0 / n_agents && omega_wta < 1.0)) throw Error("omega_wta must lie in (1/N, 1)");
}

WeightState WeightState::uniform(int n_agents) {
    WeightState s;
    s.agent = Vector::Constant(n_agents, 1.0 / n_agents);
    s.pairwise = Vector::Constant(3, 1.0 / 3.0);
    return s;
}

double alpha_schedule(double t, double lambda) {
    if (t <= 0.0) return 0.0;
    return 1.0 - std::exp(-t / lambda);
}

long burn_in_periods(double target_alpha, double lambda) {
    if (!(target_alpha >= 0.0 && target_alpha < 1.0)) throw Error("target alpha must lie in [0, 1)");
    const double t = -lambda * std::log1p(-target_alpha);
    // guard against ceil landing one high on an exact integer
    const long c = static_cast<long>(std::ceil(t - 1e-9));
    return c < 0 ? 0 : c;
}

Vector bayes_mix(const Vector& truncated_weights, double alpha) {
    const auto n = static_cast<double>(truncated_weights.size());
    return alpha * truncated_weights.array() + (1.0 - alpha) / n;
}

Vector pairwise_mix(const Vector& pair_values, double alpha) {
    return bayes_mix(truncate_normalize<double>(pair_values), alpha);
}

std::optional<double> rolling_sharpe(std::span<const double> returns, int n_win, double annualization, double cap) {
    if (n_win < 1 || returns.size() < static_cast<std::size_t>(n_win)) return std::nullopt;
    const auto window = returns.last(static_cast<std::size_t>(n_win));
    double mean = 0.0;
    for (double r : window) mean += r;
    mean /= n_win;
    double ss = 0.0;
    for (double r : window) ss += (r - mean) * (r - mean);
    const double sd = n_win > 1 ? std::sqrt(ss / (n_win - 1)) : 0.0;
    if (sd < 1e-12) return mean > 0.0 ? cap : (mean < 0.0 ? -cap : 0.0);
    return std::sqrt(annualization) * mean / sd;
}

WtaOutcome wta_override(const Vector& omega, const Vector& rolling_sharpes, double theta_wta, double omega_wta) {
    WtaOutcome out{omega, false, -1, 0.0};
    const Eigen::Index n = omega.size();
    if (n < 2 || rolling_sharpes.size() != n) return out;

    Eigen::Index lead = 0;
    rolling_sharpes.maxCoeff(&lead);
    const double others = (rolling_sharpes.sum() - rolling_sharpes(lead)) / static_cast<double>(n - 1);
    const double best = rolling_sharpes(lead);
    if (!(best > 0.0 && others > 0.0)) return out;
    out.ratio = best / others;
    if (out.ratio < theta_wta) return out;

    const double rest = omega.sum() - omega(lead);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == lead) continue;
        out.weights(i) = rest > 0.0 ? (1.0 - omega_wta) * omega(i) / rest
                                    : (1.0 - omega_wta) / static_cast<double>(n - 1);
    }
    out.weights(lead) = omega_wta;
    out.active = true;
    out.dominant = static_cast<int>(lead);
    return out;
}

}  // namespace mrc
