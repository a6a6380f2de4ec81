#include "mrc/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace mrc {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

double parse_double(std::string_view key, std::string_view s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error("config " + std::string(key) + ": not a number: " + std::string(s));
    return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view s) {
    Int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw Error("config " + std::string(key) + ": not an integer: " + std::string(s));
    return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    if (trim(s).empty()) return out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.emplace_back(trim(s.substr(pos, next == std::string_view::npos ? next : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i];
    return out;
}

struct Key {
    std::string name;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, std::string_view)> set;
};

template <typename Proj>
Key real(std::string name, Proj proj) {
    return {name, [proj](const RunConfig& c) { return fmt(proj(const_cast<RunConfig&>(c))); },
            [proj, name](RunConfig& c, std::string_view v) { proj(c) = parse_double(name, v); }};
}

template <typename Proj>
Key integer(std::string name, Proj proj) {
    return {name, [proj](const RunConfig& c) { return std::to_string(proj(const_cast<RunConfig&>(c))); },
            [proj, name](RunConfig& c, std::string_view v) {
                using T = std::remove_reference_t<decltype(proj(c))>;
                proj(c) = parse_int<T>(name, v);
            }};
}

template <typename Proj>
Key text(std::string name, Proj proj) {
    return {name, [proj](const RunConfig& c) { return proj(const_cast<RunConfig&>(c)); },
            [proj](RunConfig& c, std::string_view v) { proj(c) = std::string(v); }};
}

template <typename Proj>
Key list(std::string name, Proj proj) {
    return {name, [proj](const RunConfig& c) { return join(proj(const_cast<RunConfig&>(c))); },
            [proj](RunConfig& c, std::string_view v) { proj(c) = split(v, ','); }};
}

#define MRC_FIELD(expr) [](RunConfig& c) -> auto& { return expr; }

const std::vector<Key>& keys() {
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back(text("prices", MRC_FIELD(c.prices)));
        k.push_back(text("features", MRC_FIELD(c.features)));
        k.push_back(text("from", MRC_FIELD(c.from)));
        k.push_back(text("to", MRC_FIELD(c.to)));
        k.push_back(text("out", MRC_FIELD(c.out)));
        k.push_back(real("bps", MRC_FIELD(c.bps)));
        k.push_back(integer("seed", MRC_FIELD(c.seed)));
        k.push_back(integer("fill_limit", MRC_FIELD(c.fill_limit)));
        k.push_back(integer("dd_peak_window", MRC_FIELD(c.dd_peak_window)));
        k.push_back(real("w_max", MRC_FIELD(c.w_max)));
        k.push_back(real("c_max", MRC_FIELD(c.c_max)));

        k.push_back(real("decay_h", MRC_FIELD(c.value.decay_h)));
        k.push_back(real("gamma_rho", MRC_FIELD(c.value.gamma_rho)));
        k.push_back(real("gamma_mu", MRC_FIELD(c.value.gamma_mu)));
        k.push_back(real("sharpe_cap", MRC_FIELD(c.value.sharpe_cap)));
        k.push_back(real("annualization", MRC_FIELD(c.value.annualization)));
        k.push_back(real("sigma_floor", MRC_FIELD(c.value.sigma_floor)));

        k.push_back(real("lambda", MRC_FIELD(c.mixture.lambda)));
        k.push_back(integer("n_win", MRC_FIELD(c.mixture.n_win)));
        k.push_back(real("theta_wta", MRC_FIELD(c.mixture.theta_wta)));
        k.push_back(real("omega_wta", MRC_FIELD(c.mixture.omega_wta)));

        k.push_back(real("xi_plus", MRC_FIELD(c.regime.xi_plus)));
        k.push_back(real("xi_minus", MRC_FIELD(c.regime.xi_minus)));
        k.push_back(real("attenuation_factor", MRC_FIELD(c.regime.attenuation_factor)));
        k.push_back(real("attenuation_ratio", MRC_FIELD(c.regime.attenuation_ratio)));
        k.push_back(real("xi_saturation", MRC_FIELD(c.regime.saturation)));
        k.push_back(real("consensus_gain", MRC_FIELD(c.regime.consensus_gain)));
        k.push_back({"multiplier_anchors",
                     [](const RunConfig& c) {
                         std::vector<std::string> v;
                         for (Eigen::Index i = 0; i < c.anchors.table.rows(); ++i)
                             for (Eigen::Index j = 0; j < 3; ++j) v.push_back(fmt(c.anchors.table(i, j)));
                         return join(v);
                     },
                     [](RunConfig& c, std::string_view s) {
                         const auto v = split(s, ',');
                         if (v.empty() || v.size() % 3 != 0)
                             throw Error("config multiplier_anchors: expected rows of three values");
                         c.anchors.table.resize(static_cast<Eigen::Index>(v.size() / 3), 3);
                         for (std::size_t i = 0; i < v.size(); ++i)
                             c.anchors.table(static_cast<Eigen::Index>(i / 3), static_cast<Eigen::Index>(i % 3)) =
                                 parse_double("multiplier_anchors", v[i]);
                     }});

        k.push_back(real("beta_s1_center", MRC_FIELD(c.blend.beta_s1_center)));
        k.push_back(real("beta_s1_scale", MRC_FIELD(c.blend.beta_s1_scale)));
        k.push_back(real("beta_s1_tau", MRC_FIELD(c.blend.beta_s1_tau)));
        k.push_back(real("beta_gc_center", MRC_FIELD(c.blend.beta_gc_center)));
        k.push_back(real("beta_gc_scale", MRC_FIELD(c.blend.beta_gc_scale)));
        k.push_back(real("beta_gc_tau", MRC_FIELD(c.blend.beta_gc_tau)));
        k.push_back(real("ema_build", MRC_FIELD(c.blend.ema_build)));
        k.push_back(real("ema_derisk", MRC_FIELD(c.blend.ema_derisk)));

        k.push_back(real("momentum_base", MRC_FIELD(c.overlay.momentum_base)));
        k.push_back(real("momentum_slope", MRC_FIELD(c.overlay.momentum_slope)));
        k.push_back(real("momentum_zcap", MRC_FIELD(c.overlay.momentum_zcap)));
        k.push_back(real("dominance_tau", MRC_FIELD(c.overlay.dominance_tau)));
        k.push_back(real("dominance_coef_volatile", MRC_FIELD(c.overlay.dominance_coef_volatile)));
        k.push_back(real("dominance_coef_bear", MRC_FIELD(c.overlay.dominance_coef_bear)));
        k.push_back(real("dominance_coef_alt", MRC_FIELD(c.overlay.dominance_coef_alt)));
        k.push_back(real("dominance_recipient_cap", MRC_FIELD(c.overlay.dominance_recipient_cap)));
        k.push_back(real("btc_floor", MRC_FIELD(c.overlay.btc_floor)));
        k.push_back(real("bear_tilt_max", MRC_FIELD(c.overlay.bear_tilt_max)));
        k.push_back(real("bear_tilt_bandwidth", MRC_FIELD(c.overlay.bear_tilt_bandwidth)));
        k.push_back(real("bear_tilt_activation", MRC_FIELD(c.overlay.bear_tilt_activation)));
        k.push_back(real("bear_tilt_btc_cap", MRC_FIELD(c.overlay.bear_tilt_btc_cap)));
        k.push_back(real("cash_target_base", MRC_FIELD(c.overlay.cash_target_base)));
        k.push_back(real("cash_target_amp", MRC_FIELD(c.overlay.cash_target_amp)));
        k.push_back(real("cash_target_bandwidth", MRC_FIELD(c.overlay.cash_target_bandwidth)));
        k.push_back(real("bull_cash_cap", MRC_FIELD(c.overlay.bull_cash_cap)));
        k.push_back(real("transition_depth", MRC_FIELD(c.overlay.transition_depth)));
        k.push_back(real("transition_tau", MRC_FIELD(c.overlay.transition_tau)));
        k.push_back(real("dd_tau", MRC_FIELD(c.overlay.dd_tau)));
        k.push_back(real("dd_nu", MRC_FIELD(c.overlay.dd_nu)));
        k.push_back(real("dd_cash_base", MRC_FIELD(c.overlay.dd_cash_base)));
        k.push_back(real("dd_cash_slope", MRC_FIELD(c.overlay.dd_cash_slope)));

        k.push_back(text("roles.btc", MRC_FIELD(c.overlay.roles.btc)));
        k.push_back(list("roles.dominance_donors", MRC_FIELD(c.overlay.roles.dominance_donors)));
        k.push_back({"roles.dominance_recipients",
                     [](const RunConfig& c) {
                         std::vector<std::string> v;
                         for (const auto& [n, s] : c.overlay.roles.dominance_recipients) v.push_back(n + ":" + fmt(s));
                         return join(v);
                     },
                     [](RunConfig& c, std::string_view s) {
                         auto& out = c.overlay.roles.dominance_recipients;
                         out.clear();
                         for (const auto& item : split(s, ',')) {
                             const auto colon = item.find(':');
                             if (colon == std::string::npos)
                                 throw Error("config roles.dominance_recipients: expected NAME:SHARE, got " + item);
                             out.emplace_back(std::string(trim(std::string_view(item).substr(0, colon))),
                                              parse_double("roles.dominance_recipients",
                                                           trim(std::string_view(item).substr(colon + 1))));
                         }
                     }});
        k.push_back(list("roles.alt_season_sources", MRC_FIELD(c.overlay.roles.alt_season_sources)));
        k.push_back(list("roles.alt_season_recipients", MRC_FIELD(c.overlay.roles.alt_season_recipients)));

        k.push_back(text("agents.policy_set", MRC_FIELD(c.agents.policy_set)));
        k.push_back(real("agents.a1_cash_base", MRC_FIELD(c.agents.a1_cash_base)));
        k.push_back(real("agents.a1_cash_amp", MRC_FIELD(c.agents.a1_cash_amp)));
        k.push_back(real("agents.a2_cash", MRC_FIELD(c.agents.a2_cash)));
        k.push_back(real("agents.vote_threshold", MRC_FIELD(c.agents.vote_threshold)));
        k.push_back(real("agents.debate_caution", MRC_FIELD(c.agents.debate_caution)));
        k.push_back(list("agents.risk_off_features", MRC_FIELD(c.agents.risk_off_features)));

        k.push_back(integer("features.window", MRC_FIELD(c.snapshot.feature_window)));
        k.push_back(list("features.activity_metrics", MRC_FIELD(c.snapshot.activity_metrics)));
        return k;
    }();
    return table;
}

#undef MRC_FIELD

}  // namespace

void RunConfig::finalize() {
    blend.w_max = overlay.w_max = agents.w_max = w_max;
    blend.c_max = overlay.c_max = agents.c_max = c_max;
    snapshot.btc = overlay.roles.btc;
    validate();
}

void RunConfig::validate() const {
    if (!(w_max > 0.0 && w_max <= 1.0)) throw Error("w_max must lie in (0, 1]");
    if (!(c_max >= 0.0 && c_max <= 1.0)) throw Error("c_max must lie in [0, 1]");
    if (!(bps >= 0.0)) throw Error("bps must be nonnegative");
    if (fill_limit < 0) throw Error("fill_limit must be nonnegative");
    if (dd_peak_window < 0) throw Error("dd_peak_window must be nonnegative");
    if (snapshot.feature_window < 2) throw Error("features.window must be at least 2");
    if (!(value.decay_h > 0.0)) throw Error("decay_h must be positive");
    if (!(value.gamma_rho >= 0.0 && value.gamma_mu >= 0.0)) throw Error("gamma weights must be nonnegative");
    if (!(value.sharpe_cap > 0.0 && value.annualization > 0.0 && value.sigma_floor >= 0.0))
        throw Error("sharpe_cap and annualization must be positive");
    if (anchors.agents() != 3) throw Error("multiplier_anchors must have one row per agent (3)");
    if (!(anchors.table.array() > 0.0).all()) throw Error("multiplier anchors must be positive");
    mixture.validate(3);
    regime.validate();
    blend.validate();
    overlay.validate();
    agents.validate();
    if (!from.empty() && !to.empty() && parse_date(from) > parse_date(to)) throw Error("empty date range: from > to");
}

DateRange RunConfig::range() const {
    DateRange r;
    if (!from.empty()) r.from = parse_date(from);
    if (!to.empty()) r.to = parse_date(to);
    return r;
}

void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value) {
    for (const auto& k : keys())
        if (k.name == key) {
            k.set(cfg, trim(value));
            return;
        }
    throw Error("unknown config key: " + std::string(key));
}

RunConfig parse_config(std::string_view text, RunConfig base) {
    std::istringstream in{std::string(text)};
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto body = trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos)
            throw Error("config line " + std::to_string(n) + ": expected key = value");
        set_config_value(base, trim(body.substr(0, eq)), body.substr(eq + 1));
    }
    return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw Error("config file not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

std::string dump_config(const RunConfig& cfg) {
    std::string out;
    for (const auto& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
    return out;
}

std::vector<std::string> config_keys() {
    std::vector<std::string> out;
    for (const auto& k : keys()) out.push_back(k.name);
    return out;
}

}  // namespace mrc
