#include "mrc/council.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mrc {

void BlendConfig::validate() const {
    if (beta_s1_scale < 0.0 || beta_gc_scale < 0.0) throw Error("blend scales must be nonnegative");
    if (!(beta_s1_tau > 0.0 && beta_gc_tau > 0.0)) throw Error("blend bandwidths must be positive");
    if (beta_s1_center + beta_s1_scale > 1.0 || beta_s1_center - beta_s1_scale < 0.0)
        throw Error("beta_s1 range must stay inside [0, 1]");
    if (beta_gc_center + beta_gc_scale > 1.0) throw Error("beta_gc range must stay below 1");
    if (!(ema_build > 0.0 && ema_build <= 1.0 && ema_derisk > 0.0 && ema_derisk <= 1.0))
        throw Error("EMA speeds must lie in (0, 1]");
    if (!(w_max > 0.0 && w_max <= 1.0)) throw Error("w_max must lie in (0, 1]");
    if (!(c_max >= 0.0 && c_max <= 1.0)) throw Error("c_max must lie in [0, 1]");
}

EnsembleValues ensemble_values(const Vector& omega_tilde, const Vector& pair_weights, const Vector& single_values,
                               const Vector& pair_values) {
    if (omega_tilde.size() != single_values.size() || pair_weights.size() != pair_values.size())
        throw Error("ensemble weights and values differ in length");
    return {omega_tilde.dot(single_values), pair_weights.dot(pair_values)};
}

BlendRatios blend_ratios(const EnsembleValues& ens, double grand_value, const BlendConfig& cfg) {
    const double gap_s2 = ens.stage2 - ens.stage1;
    const double gap_gc = grand_value - ens.stage1;
    BlendRatios b;
    b.beta_s1 = cfg.beta_s1_center + cfg.beta_s1_scale * std::tanh(-gap_s2 / cfg.beta_s1_tau);
    b.beta_gc = std::max(0.0, cfg.beta_gc_center + cfg.beta_gc_scale * std::tanh(gap_gc / cfg.beta_gc_tau));
    return b;
}

double divergence_discount(double beta_gc, double kappa) { return beta_gc * (0.5 + 0.5 * kappa); }

namespace {

Vector weighted_mix(std::span<const Portfolio> parts, const Vector& weights, Eigen::Index dim) {
    if (static_cast<Eigen::Index>(parts.size()) != weights.size()) throw Error("portfolio and weight counts differ");
    Vector out = Vector::Zero(dim + 1);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (parts[i].size() != dim) throw Error("portfolio dimension mismatch");
        out += weights(static_cast<Eigen::Index>(i)) * parts[i].stacked();
    }
    return out;
}

// Adds `amount` to eligible coordinates in proportion to their weight, or
// evenly when the eligible weight is zero.
void distribute(Vector& w, double amount, const std::vector<bool>& eligible) {
    double base = 0.0;
    int count = 0;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        if (!eligible[static_cast<std::size_t>(k)]) continue;
        base += w(k);
        ++count;
    }
    if (count == 0) return;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
        if (!eligible[static_cast<std::size_t>(k)]) continue;
        w(k) += base > 0.0 ? amount * w(k) / base : amount / count;
    }
}

}  // namespace

Portfolio compose_council(std::span<const Portfolio> stage1, std::span<const Portfolio> stage2, const Portfolio& grand,
                          const Vector& omega_tilde, const Vector& pair_weights, double beta_s1, double beta_gc_final) {
    const Eigen::Index dim = grand.size();
    const Vector s1 = weighted_mix(stage1, omega_tilde, dim);
    const Vector s2 = weighted_mix(stage2, pair_weights, dim);
    const Vector mixed =
        beta_gc_final * grand.stacked() + (1.0 - beta_gc_final) * (beta_s1 * s1 + (1.0 - beta_s1) * s2);
    return Portfolio::from_stacked(mixed);
}

Portfolio ema_blend(const Portfolio& target, const Portfolio& previous, double build, double derisk) {
    if (target.size() != previous.size()) throw Error("portfolio dimension mismatch");
    const Vector t = target.stacked();
    const Vector p = previous.stacked();
    Vector out(t.size());
    for (Eigen::Index k = 0; k < t.size(); ++k) {
        const double eta = t(k) >= p(k) ? build : derisk;
        out(k) = eta * t(k) + (1.0 - eta) * p(k);
    }
    return Portfolio::from_stacked(out);
}

Portfolio ema_smooth(const Portfolio& target, const Portfolio& previous, double build, double derisk) {
    Portfolio out = ema_blend(target, previous, build, derisk);
    const double total = out.total();
    if (total > 0.0) {
        out.assets /= total;
        out.cash /= total;
    }
    return out;
}

Portfolio project_constraints(const Portfolio& raw, double w_max, double c_max) {
    const Eigen::Index k = raw.size();
    constexpr double tol = 1e-12;
    if (static_cast<double>(k) * w_max + c_max < 1.0 - tol)
        throw Error("constraint set infeasible for K*w_max + c_max < 1 (K=" + std::to_string(k) +
                    ", w_max=" + std::to_string(w_max) + ", c_max=" + std::to_string(c_max) + ")");

    Vector w = raw.assets.cwiseMax(0.0);
    double c = std::max(raw.cash, 0.0);
    bool changed = (w.array() != raw.assets.array()).any() || c != raw.cash;

    double total = w.sum() + c;
    if (!(total > 0.0)) {
        w = Vector::Constant(k, 1.0 / static_cast<double>(k));
        c = 0.0;
        total = 1.0;
        changed = true;
    }
    if (std::abs(total - 1.0) > tol) {
        w /= total;
        c /= total;
        changed = true;
    }

    std::vector<bool> capped(static_cast<std::size_t>(k), false);
    auto open = [&] {
        std::vector<bool> e(static_cast<std::size_t>(k));
        for (Eigen::Index i = 0; i < k; ++i) e[static_cast<std::size_t>(i)] = !capped[static_cast<std::size_t>(i)] && w(i) < w_max;
        return e;
    };

    if (c > c_max) {
        const double excess = c - c_max;
        c = c_max;
        distribute(w, excess, open());
        changed = true;
    }

    for (Eigen::Index iter = 0; iter <= k + 1; ++iter) {
        double excess = 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            if (w(i) > w_max) {
                excess += w(i) - w_max;
                w(i) = w_max;
                capped[static_cast<std::size_t>(i)] = true;
            }
        }
        if (excess <= 0.0) break;
        changed = true;
        const auto eligible = open();
        if (std::none_of(eligible.begin(), eligible.end(), [](bool b) { return b; })) {
            c += excess;
            if (c > c_max + 1e-9)
                throw Error("constraint set infeasible for K*w_max + c_max < 1: residual mass " + std::to_string(c - c_max));
            c = std::min(c, c_max);
            break;
        }
        distribute(w, excess, eligible);
    }

    if (changed) {
        const double residual = 1.0 - (w.sum() + c);
        if (c + residual >= 0.0 && c + residual <= c_max)
            c += residual;
        else {
            Eigen::Index best = 0;
            w.minCoeff(&best);
            w(best) += residual;
        }
    }
    return {std::move(w), c};
}

}  // namespace mrc
