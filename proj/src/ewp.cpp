#include "mrc/ewp.hpp"

namespace mrc {

double char_value_from_moments(double mean, double stddev, const CharValueParams& p) {
    double sharpe = 0.0;
    if (stddev < p.sigma_floor)
        sharpe = mean > 0.0 ? p.sharpe_cap : (mean < 0.0 ? -p.sharpe_cap : 0.0);
    else
        sharpe = std::sqrt(p.annualization) * mean / stddev;
    return p.gamma_rho * sharpe + p.gamma_mu * p.annualization * mean;
}

double char_value(std::span<const double> history, const CharValueParams& p) {
    if (history.empty()) return 0.0;
    const auto m = ewp_moments<double>(history, p.decay_h);
    return char_value_from_moments(m.mean, m.stddev, p);
}

ReturnHistory::ReturnHistory(int n_players) : n_players_(n_players) {
    if (n_players < 1 || n_players > 16) throw Error("ReturnHistory player count out of range");
    histories_.resize((std::size_t{1} << n_players) - 1);
}

void ReturnHistory::append(std::span<const double> returns_by_mask) {
    if (returns_by_mask.size() != histories_.size())
        throw Error("ledger update expects " + std::to_string(histories_.size()) + " coalition returns, got " +
                    std::to_string(returns_by_mask.size()));
    for (std::size_t i = 0; i < histories_.size(); ++i) histories_[i].push_back(returns_by_mask[i]);
}

std::span<const double> ReturnHistory::of(CoalitionId s) const {
    if (s.mask() == 0 || s.mask() > histories_.size()) throw Error("coalition outside ledger");
    return histories_[s.mask() - 1];
}

CharacteristicGame<double> ReturnHistory::game(const CharValueParams& p) const {
    CharacteristicGame<double> g(n_players_);
    for (std::size_t i = 0; i < histories_.size(); ++i)
        g.set(CoalitionId(static_cast<CoalitionId::Mask>(i + 1)), char_value(histories_[i], p));
    return g;
}

}  // namespace mrc
