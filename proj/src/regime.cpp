#include "mrc/regime.hpp"

#include <algorithm>
#include <cmath>

namespace mrc {

void RegimeConfig::validate() const {
    if (!(xi_minus < 0.0 && 0.0 < xi_plus)) throw Error("regime thresholds must satisfy xi_minus < 0 < xi_plus");
    if (!(attenuation_factor >= 0.0 && attenuation_factor <= 1.0)) throw Error("attenuation_factor must lie in [0, 1]");
    if (!(attenuation_ratio >= 0.0)) throw Error("attenuation_ratio must be nonnegative");
    if (!(saturation > 0.0 && saturation < 1.0)) throw Error("saturation must lie in (0, 1)");
    if (!(consensus_gain >= 0.0)) throw Error("consensus_gain must be nonnegative");
}

MultiplierAnchors MultiplierAnchors::defaults() {
    MultiplierAnchors a;
    a.table.resize(3, 3);
    a.table << 1.50, 1.20, 0.60,  //
        0.90, 1.00, 0.90,         //
        0.60, 0.80, 1.50;
    return a;
}

double MultiplierAnchors::max_slope() const {
    return std::max((table.col(0) - table.col(1)).cwiseAbs().maxCoeff(),
                    (table.col(1) - table.col(2)).cwiseAbs().maxCoeff());
}

double regime_score(double r_30d, double sigma_30d, double r_7d, const RegimeConfig& cfg, bool* attenuated) {
    double xi = 0.0;
    if (sigma_30d > 0.0)
        xi = std::tanh(r_30d / sigma_30d);
    else if (r_30d != 0.0)
        xi = std::copysign(cfg.saturation, r_30d);
    xi = std::clamp(xi, -cfg.saturation, cfg.saturation);

    const bool conflict = r_7d != 0.0 && r_30d != 0.0 && std::signbit(r_7d) != std::signbit(r_30d) &&
                          std::abs(r_7d) > cfg.attenuation_ratio * std::abs(r_30d);
    if (conflict) xi *= cfg.attenuation_factor;
    if (attenuated) *attenuated = conflict;
    return xi;
}

Regime label(double xi, double xi_plus, double xi_minus) {
    if (xi > xi_plus) return Regime::Bull;
    if (xi < xi_minus) return Regime::Bear;
    return Regime::Volatile;
}

RegimeState make_regime_state(double r_30d, double sigma_30d, double r_7d, double previous_score,
                              const RegimeConfig& cfg) {
    RegimeState s;
    s.score = regime_score(r_30d, sigma_30d, r_7d, cfg, &s.attenuated);
    s.label = label(s.score, cfg.xi_plus, cfg.xi_minus);
    s.previous_score = previous_score;
    return s;
}

Vector psi(const MultiplierAnchors& anchors, double xi) {
    xi = std::clamp(xi, -1.0, 1.0);
    const auto& t = anchors.table;
    if (xi >= 0.0) return (1.0 - xi) * t.col(1) + xi * t.col(0);
    return (1.0 + xi) * t.col(1) - xi * t.col(2);
}

namespace {

std::array<double, 3> regime_mass(const Vector& omega, std::span<const Regime> votes) {
    if (static_cast<Eigen::Index>(votes.size()) != omega.size()) throw Error("one regime vote per agent required");
    std::array<double, 3> mass{};
    for (std::size_t i = 0; i < votes.size(); ++i) mass[static_cast<std::size_t>(votes[i])] += omega(static_cast<Eigen::Index>(i));
    return mass;
}

}  // namespace

double consensus_kappa(const Vector& omega, std::span<const Regime> votes) {
    const auto mass = regime_mass(omega, votes);
    return *std::max_element(mass.begin(), mass.end());
}

std::vector<Regime> plurality_regimes(const Vector& omega, std::span<const Regime> votes) {
    const auto mass = regime_mass(omega, votes);
    const double top = *std::max_element(mass.begin(), mass.end());
    std::vector<Regime> out;
    for (Regime r : kAllRegimes)
        if (mass[static_cast<std::size_t>(r)] == top) out.push_back(r);
    return out;
}

Vector apply_multiplier(const Vector& omega, const Vector& psi_values, std::span<const Regime> votes, double kappa,
                        double gain) {
    const auto n = static_cast<double>(omega.size());
    Vector mult = psi_values;
    const double strength = std::max(0.0, (kappa - 1.0 / n) / (1.0 - 1.0 / n));
    if (strength > 0.0 && gain > 0.0) {
        const auto leaders = plurality_regimes(omega, votes);
        for (std::size_t i = 0; i < votes.size(); ++i)
            if (std::find(leaders.begin(), leaders.end(), votes[i]) != leaders.end())
                mult(static_cast<Eigen::Index>(i)) *= 1.0 + gain * strength;
    }
    Vector out = omega.cwiseProduct(mult);
    const double total = out.sum();
    if (!(total > 0.0)) return Vector::Constant(omega.size(), 1.0 / n);
    return out / total;
}

}  // namespace mrc
