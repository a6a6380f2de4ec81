#include "mrc/overlays.hpp"

#include "mrc/council.hpp"

#include <algorithm>
#include <cmath>

namespace mrc {

namespace {

double mass_of(const Vector& w, const std::vector<Eigen::Index>& idx) {
    double m = 0.0;
    for (auto i : idx) m += w(i);
    return m;
}

// Removes up to `amount` from idx in proportion to current weight; returns what was taken.
double take_pro_rata(Vector& w, const std::vector<Eigen::Index>& idx, double amount) {
    const double available = mass_of(w, idx);
    if (!(available > 0.0) || !(amount > 0.0)) return 0.0;
    const double taken = std::min(amount, available);
    const double keep = 1.0 - taken / available;
    for (auto i : idx) w(i) *= keep;
    return taken;
}

// Adds `amount` to idx in proportion to current weight, evenly when they hold nothing.
void give_pro_rata(Vector& w, const std::vector<Eigen::Index>& idx, double amount) {
    if (idx.empty() || amount == 0.0) return;
    const double base = mass_of(w, idx);
    for (auto i : idx) w(i) += base > 0.0 ? amount * w(i) / base : amount / static_cast<double>(idx.size());
}

std::vector<Eigen::Index> all_assets(Eigen::Index k) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    return idx;
}

// Moves cash toward target_share of the portfolio's mass, trimming or
// redeploying longs pro-rata. With `lower_only` cash is never raised.
Portfolio steer_cash(const Portfolio& p, double target_share, bool lower_only) {
    Portfolio out = p;
    const double target = target_share * p.total();
    const auto idx = all_assets(p.size());
    if (out.cash < target && !lower_only) {
        out.cash += take_pro_rata(out.assets, idx, target - out.cash);
    } else if (out.cash > target) {
        give_pro_rata(out.assets, idx, out.cash - target);
        out.cash = target;
    }
    return out;
}

}  // namespace

void OverlayConfig::validate() const {
    const double bands[] = {momentum_zcap, dominance_tau, bear_tilt_bandwidth, cash_target_bandwidth, transition_tau, dd_tau};
    for (double b : bands)
        if (!(b > 0.0)) throw Error("overlay bandwidths must be positive");
    const double coefs[] = {momentum_base,       momentum_slope,      dominance_coef_volatile, dominance_coef_bear,
                            dominance_coef_alt,  dominance_recipient_cap, btc_floor,           bear_tilt_max,
                            bear_tilt_activation, bear_tilt_btc_cap,  cash_target_base,        cash_target_amp,
                            bull_cash_cap,       transition_depth,    dd_nu,                   dd_cash_base,
                            dd_cash_slope,       w_max,               c_max};
    for (double c : coefs)
        if (!(c >= 0.0 && c <= 1.0)) throw Error("overlay coefficients must lie in [0, 1]");
    double shares = 0.0;
    for (const auto& [name, share] : roles.dominance_recipients) {
        if (!(share >= 0.0)) throw Error("recipient share for " + name + " must be nonnegative");
        shares += share;
    }
    if (!roles.dominance_recipients.empty() && std::abs(shares - 1.0) > 1e-9)
        throw Error("dominance recipient shares must sum to 1");
}

AssetRoles AssetRoles::resolve(const RoleConfig& roles, const std::vector<std::string>& assets) {
    AssetRoles r;
    r.asset_count = static_cast<Eigen::Index>(assets.size());
    auto find = [&](const std::string& name) -> std::optional<Eigen::Index> {
        const auto it = std::find(assets.begin(), assets.end(), name);
        if (it == assets.end()) return std::nullopt;
        return static_cast<Eigen::Index>(it - assets.begin());
    };
    auto list = [&](const std::vector<std::string>& names) {
        std::vector<Eigen::Index> out;
        for (const auto& n : names)
            if (auto i = find(n)) out.push_back(*i);
        return out;
    };
    r.btc = find(roles.btc);
    r.donors = list(roles.dominance_donors);
    double share_sum = 0.0;
    for (const auto& [name, share] : roles.dominance_recipients)
        if (auto i = find(name)) {
            r.recipients.emplace_back(*i, share);
            share_sum += share;
        }
    if (share_sum > 0.0)
        for (auto& rec : r.recipients) rec.second /= share_sum;
    r.alt_sources = list(roles.alt_season_sources);
    r.alt_recipients = list(roles.alt_season_recipients);
    return r;
}

std::vector<Eigen::Index> AssetRoles::altcoins() const {
    std::vector<Eigen::Index> out;
    for (Eigen::Index i = 0; i < asset_count; ++i)
        if (!btc || i != *btc) out.push_back(i);
    return out;
}

bool OverlayTrace::chain_consistent() const {
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (!(steps[i].pre == steps[i - 1].post)) return false;
    return true;
}

OverlaySignals OverlaySignals::from(const MarketSnapshot& snap, const RegimeState& regime, double drawdown) {
    OverlaySignals s;
    s.z = snap.z30;
    s.btc_minus_alts = snap.btc_minus_alts_30;
    s.onchain_diff = snap.onchain_btc_diff;
    s.regime = regime;
    s.drawdown = drawdown;
    return s;
}

double momentum_strength(double xi, const OverlayConfig& cfg) {
    return cfg.momentum_base + cfg.momentum_slope * std::max(0.0, xi);
}

Portfolio momentum_overlay(const Portfolio& p, const Vector& z, double xi, const OverlayConfig& cfg) {
    if (z.size() != p.size()) throw Error("momentum z-scores do not match the asset count");
    const double eta = momentum_strength(xi, cfg);
    Portfolio out = p;
    out.assets = p.assets.array() * (1.0 + eta * (z.array() / cfg.momentum_zcap).tanh());
    return out;
}

Portfolio dominance_overlay(const Portfolio& p, double btc_minus_alts, Regime regime, const AssetRoles& roles,
                            const OverlayConfig& cfg, std::string* note) {
    const double d = std::tanh(btc_minus_alts / cfg.dominance_tau);
    Portfolio out = p;
    auto say = [&](std::string s) {
        if (note) *note = std::move(s);
    };

    if (d > 0.0 && (regime == Regime::Volatile || regime == Regime::Bear)) {
        if (roles.donors.empty() || roles.recipients.empty()) {
            say("btc season leg skipped: donor or recipient assets missing");
            return out;
        }
        const double coef = regime == Regime::Volatile ? cfg.dominance_coef_volatile : cfg.dominance_coef_bear;
        const double moved = take_pro_rata(out.assets, roles.donors, d * coef);
        double residual = 0.0;
        for (const auto& [idx, share] : roles.recipients) {
            const double want = moved * share;
            const double room = std::max(0.0, cfg.dominance_recipient_cap - out.assets(idx));
            const double put = std::min(want, room);
            out.assets(idx) += put;
            residual += want - put;
        }
        for (const auto& [idx, share] : roles.recipients) {
            if (residual <= 0.0) break;
            const double room = std::max(0.0, cfg.dominance_recipient_cap - out.assets(idx));
            const double put = std::min(residual, room);
            out.assets(idx) += put;
            residual -= put;
        }
        out.cash += residual;
        say("btc season: moved " + std::to_string(moved) + (residual > 0.0 ? ", overflow to cash" : ""));
    } else if (d < 0.0 && regime == Regime::Bull) {
        if (roles.alt_sources.empty() || roles.alt_recipients.empty()) {
            say("alt season leg skipped: source or recipient assets missing");
            return out;
        }
        const double moved = take_pro_rata(out.assets, roles.alt_sources, -d * cfg.dominance_coef_alt);
        give_pro_rata(out.assets, roles.alt_recipients, moved);
        say("alt season: moved " + std::to_string(moved));
    }
    return out;
}

Portfolio btc_floor(const Portfolio& p, Regime regime, const AssetRoles& roles, const OverlayConfig& cfg) {
    if (regime != Regime::Volatile || !roles.btc) return p;
    Portfolio out = p;
    const Eigen::Index btc = *roles.btc;
    const double shortfall = cfg.btc_floor - out.assets(btc);
    if (shortfall <= 0.0) return out;
    double got = take_pro_rata(out.assets, roles.altcoins(), shortfall);
    const double from_cash = std::min(shortfall - got, std::max(0.0, out.cash));
    out.cash -= from_cash;
    got += from_cash;
    out.assets(btc) += got;
    return out;
}

double bear_tilt_size(double onchain_diff, const OverlayConfig& cfg) {
    return cfg.bear_tilt_max * std::tanh(onchain_diff / cfg.bear_tilt_bandwidth);
}

Portfolio bear_onchain_tilt(const Portfolio& p, Regime regime, std::optional<double> onchain_diff,
                            const AssetRoles& roles, const OverlayConfig& cfg, std::string* note) {
    if (regime != Regime::Bear || !roles.btc) return p;
    if (!onchain_diff) {
        if (note) *note = "skipped: on-chain data unavailable";
        return p;
    }
    const double delta = bear_tilt_size(*onchain_diff, cfg);
    if (!(delta > cfg.bear_tilt_activation)) return p;
    Portfolio out = p;
    const Eigen::Index btc = *roles.btc;
    const double add = std::min(delta, std::max(0.0, cfg.bear_tilt_btc_cap - out.assets(btc)));
    out.assets(btc) += take_pro_rata(out.assets, roles.altcoins(), add);
    return out;
}

double volatile_cash_target_level(double xi, const OverlayConfig& cfg) {
    return cfg.cash_target_base + cfg.cash_target_amp * std::exp(-std::abs(xi) / cfg.cash_target_bandwidth);
}

Portfolio volatile_cash_target(const Portfolio& p, double xi, Regime regime, const OverlayConfig& cfg) {
    switch (regime) {
        case Regime::Volatile: return steer_cash(p, volatile_cash_target_level(xi, cfg), false);
        case Regime::Bull: return steer_cash(p, cfg.bull_cash_cap, true);
        case Regime::Bear: return p;
    }
    return p;
}

double transition_scale(double xi_prev, double xi_now, const OverlayConfig& cfg) {
    const double drop = std::max(0.0, xi_prev - xi_now);
    return 1.0 - cfg.transition_depth * std::tanh(drop / cfg.transition_tau);
}

Portfolio transition_buffer(const Portfolio& p, double xi_prev, double xi_now, const OverlayConfig& cfg) {
    const double s = transition_scale(xi_prev, xi_now, cfg);
    if (s == 1.0) return p;
    Portfolio out = p;
    out.cash += (1.0 - s) * out.long_mass();
    out.assets *= s;
    return out;
}

double drawdown_scale(double drawdown, double xi, const OverlayConfig& cfg) {
    const double gate = std::max(0.0, -xi);
    return 1.0 - gate * std::tanh(drawdown / cfg.dd_tau) * cfg.dd_nu;
}

double drawdown_cash_cap(double xi, const OverlayConfig& cfg) {
    return cfg.dd_cash_base + cfg.dd_cash_slope * std::max(0.0, -xi);
}

Portfolio drawdown_protect(const Portfolio& p, double drawdown, double xi, const OverlayConfig& cfg) {
    const double s = drawdown_scale(drawdown, xi, cfg);
    const double longs = p.long_mass();
    if (s >= 1.0 || !(longs > 0.0)) return p;
    // Freed weight moves to cash only up to the dynamic cap; cash already
    // above the cap is left where earlier overlays put it.
    const double room = std::max(0.0, drawdown_cash_cap(xi, cfg) * p.total() - p.cash);
    const double moved = std::min((1.0 - s) * longs, room);
    Portfolio out = p;
    out.assets *= 1.0 - moved / longs;
    out.cash += moved;
    return out;
}

CascadeResult run_cascade(const Portfolio& council, const OverlaySignals& sig, const AssetRoles& roles,
                          const OverlayConfig& cfg) {
    CascadeResult res;
    Portfolio cur = council;
    const double xi = sig.regime.score;
    const Regime regime = sig.regime.label;

    auto record = [&](std::string name, Portfolio next, std::vector<std::pair<std::string, double>> signals,
                      std::string note = {}) {
        OverlayStep step;
        step.name = std::move(name);
        step.pre = cur;
        step.active = !(next == cur);
        step.post = std::move(next);
        step.signals = std::move(signals);
        step.note = std::move(note);
        cur = step.post;
        res.trace.steps.push_back(std::move(step));
    };

    record("momentum", momentum_overlay(cur, sig.z, xi, cfg),
           {{"eta", momentum_strength(xi, cfg)}, {"z_max", sig.z.size() ? sig.z.maxCoeff() : 0.0}});

    std::string note;
    auto dom = dominance_overlay(cur, sig.btc_minus_alts, regime, roles, cfg, &note);
    record("dominance", std::move(dom),
           {{"delta_btc_ew", sig.btc_minus_alts}, {"d", std::tanh(sig.btc_minus_alts / cfg.dominance_tau)}}, note);

    record("btc_floor", btc_floor(cur, regime, roles, cfg),
           {{"w_btc", roles.btc ? cur.assets(*roles.btc) : 0.0}, {"floor", cfg.btc_floor}});

    note.clear();
    auto tilt = bear_onchain_tilt(cur, regime, sig.onchain_diff, roles, cfg, &note);
    std::vector<std::pair<std::string, double>> tilt_sig;
    if (sig.onchain_diff) tilt_sig = {{"delta_oc", *sig.onchain_diff}, {"tilt", bear_tilt_size(*sig.onchain_diff, cfg)}};
    record("bear_onchain_tilt", std::move(tilt), std::move(tilt_sig), note);

    record("cash_target", volatile_cash_target(cur, xi, regime, cfg),
           {{"xi", xi}, {"c_tgt", regime == Regime::Bull ? cfg.bull_cash_cap : volatile_cash_target_level(xi, cfg)}});

    record("transition_buffer", transition_buffer(cur, sig.regime.previous_score, xi, cfg),
           {{"xi_prev", sig.regime.previous_score}, {"s_trans", transition_scale(sig.regime.previous_score, xi, cfg)}});

    record("drawdown", drawdown_protect(cur, sig.drawdown, xi, cfg),
           {{"dd", sig.drawdown}, {"s_dd", drawdown_scale(sig.drawdown, xi, cfg)}, {"c_cap", drawdown_cash_cap(xi, cfg)}});

    record("projection", project_constraints(cur, cfg.w_max, cfg.c_max), {{"mass_in", cur.total()}});

    res.portfolio = cur;
    return res;
}

}  // namespace mrc
