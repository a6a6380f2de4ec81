#include "mrc/backtester.hpp"

#include "mrc/adaptive_weights.hpp"
#include "mrc/council.hpp"
#include "mrc/overlays.hpp"
#include "mrc/regime.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace mrc {

ShapleyReport ShapleyLedger::report() const {
    ShapleyReport r;
    r.omega = weights.agent;
    r.pairwise = weights.pairwise;
    r.values = game.as_three_player();
    r.rolling_sharpe = Vector::Constant(3, std::numeric_limits<double>::quiet_NaN());
    for (int i = 0; i < 3; ++i)
        if (rolling_sharpe[static_cast<std::size_t>(i)]) r.rolling_sharpe(i) = *rolling_sharpe[static_cast<std::size_t>(i)];
    r.wta_active = weights.wta_active;
    r.dominant = weights.dominant;
    return r;
}

void ledger_update(ShapleyLedger& ledger, std::span<const double> returns_by_mask, const RunConfig& cfg) {
    ledger.history.append(returns_by_mask);
    ledger.game = ledger.history.game(cfg.value);
    ledger.credit = shapley_closed3(ledger.game);

    const auto v = ledger.game.as_three_player();
    const double alpha = alpha_schedule(static_cast<double>(ledger.history.length()), cfg.mixture.lambda);
    WeightState& w = ledger.weights;
    w.agent = bayes_mix(ledger.credit.weights, alpha);
    w.pairwise = pairwise_mix((Vector(3) << v[3], v[4], v[5]).finished(), alpha);
    w.periods = ledger.periods();

    Vector sharpes(3);
    bool ready = true;
    for (int i = 0; i < 3; ++i) {
        auto s = rolling_sharpe(ledger.history.of(CoalitionId::of({i})), cfg.mixture.n_win, cfg.value.annualization,
                                cfg.value.sharpe_cap);
        ledger.rolling_sharpe[static_cast<std::size_t>(i)] = s;
        if (s)
            sharpes(i) = *s;
        else
            ready = false;
    }
    w.wta_active = false;
    w.dominant = -1;
    if (ready) {
        const auto wta = wta_override(w.agent, sharpes, cfg.mixture.theta_wta, cfg.mixture.omega_wta);
        w.agent = wta.weights;
        w.wta_active = wta.active;
        w.dominant = wta.dominant;
    }
}

double BacktestState::drawdown(int window) const {
    const std::size_t n = equity.size();
    const std::size_t first = window > 0 && n > static_cast<std::size_t>(window) ? n - static_cast<std::size_t>(window) : 0;
    double peak = 0.0;
    for (std::size_t i = first; i < n; ++i) peak = std::max(peak, equity[i]);
    return peak > 0.0 ? std::max(0.0, 1.0 - equity.back() / peak) : 0.0;
}

StepResult step(BacktestState& state, const PriceTable& prices, const FeatureTable& aligned_features,
                Eigen::Index t, const AgentPolicy& policy, const RunConfig& cfg) {
    const MarketSnapshot snap = snapshot(prices, aligned_features, t, cfg.snapshot);
    const RegimeState regime =
        make_regime_state(snap.ew_log_30, snap.ew_vol_30, snap.ew_log_7, state.previous_score, cfg.regime);

    // Stage 1 and 2: private decisions, then pairwise debates.
    std::array<AgentDecision, 3> s1;
    for (int i = 0; i < 3; ++i) s1[static_cast<std::size_t>(i)] = policy.decide(i, snap);
    const std::array<AgentDecision, 3> s2{debate(s1[0], s1[1], cfg.agents), debate(s1[0], s1[2], cfg.agents),
                                          debate(s1[1], s1[2], cfg.agents)};

    const ShapleyReport report = state.ledger.report();
    const AgentDecision grand = grand_readout(s1, s2, report, cfg.agents);

    const std::array<Regime, 3> votes{s1[0].vote, s1[1].vote, s1[2].vote};
    const double kappa = consensus_kappa(report.omega, votes);
    const Vector omega_tilde =
        apply_multiplier(report.omega, psi(cfg.anchors, regime.score), votes, kappa, cfg.regime.consensus_gain);

    const auto& v = report.values;
    const Vector singles = (Vector(3) << v[0], v[1], v[2]).finished();
    const Vector pairs = (Vector(3) << v[3], v[4], v[5]).finished();
    const EnsembleValues ens = ensemble_values(omega_tilde, report.pairwise, singles, pairs);
    const BlendRatios beta = blend_ratios(ens, v[6], cfg.blend);
    const double beta_gc_final = divergence_discount(beta.beta_gc, kappa);

    const std::array<Portfolio, 3> p1{s1[0].portfolio, s1[1].portfolio, s1[2].portfolio};
    const std::array<Portfolio, 3> p2{s2[0].portfolio, s2[1].portfolio, s2[2].portfolio};
    const Portfolio council =
        compose_council(p1, p2, grand.portfolio, omega_tilde, report.pairwise, beta.beta_s1, beta_gc_final);
    const Portfolio smoothed = project_constraints(
        state.previous ? ema_smooth(council, *state.previous, cfg.blend.ema_build, cfg.blend.ema_derisk) : council,
        cfg.w_max, cfg.c_max);

    const double dd = state.drawdown(cfg.dd_peak_window);
    const auto roles = AssetRoles::resolve(cfg.overlay.roles, prices.assets);
    CascadeResult cascade = run_cascade(smoothed, OverlaySignals::from(snap, regime, dd), roles, cfg.overlay);

    StepResult out;
    TraceRecord& r = out.record;
    r.date = format_date(snap.date);
    r.regime = regime;
    r.r30 = snap.ew_log_30;
    r.sigma30 = snap.ew_vol_30;
    r.r7 = snap.ew_log_7;
    r.btc_minus_alts = snap.btc_minus_alts_30;
    r.onchain_diff = snap.onchain_btc_diff;
    r.drawdown = dd;
    r.partial = snap.partial;
    r.coalitions = {s1[0], s1[1], s1[2], s2[0], s2[1], s2[2], grand};
    r.values = v;
    r.phi = state.ledger.credit.phi;
    r.omega = report.omega;
    r.omega_tilde = omega_tilde;
    r.pairwise = report.pairwise;
    r.wta = report.wta_active;
    r.dominant = report.dominant;
    r.rolling_sharpe = state.ledger.rolling_sharpe;
    r.v_s1 = ens.stage1;
    r.v_s2 = ens.stage2;
    r.beta_s1 = beta.beta_s1;
    r.beta_gc = beta.beta_gc;
    r.beta_gc_final = beta_gc_final;
    r.kappa = kappa;
    r.council = council;
    r.smoothed = smoothed;
    r.overlays = std::move(cascade.trace);
    r.executed = cascade.portfolio;

    for (std::size_t i = 0; i < 7; ++i) out.coalition_portfolios[i] = r.coalitions[i].portfolio;

    if (t + 1 < prices.periods()) {
        // Raw coalition portfolios, before smoothing, overlays and costs, feed the ledger.
        out.next_returns = prices.next_returns(t);
        std::array<double, 7> by_mask{};
        for (std::size_t i = 0; i < 7; ++i)
            by_mask[static_cast<std::size_t>(kCanonicalSlot[i])] = out.coalition_portfolios[i].assets.dot(*out.next_returns);
        ledger_update(state.ledger, by_mask, cfg);
    }
    state.previous = r.executed;
    state.previous_score = regime.score;
    return out;
}

Portfolio drift(const Portfolio& held, const Vector& asset_returns) {
    Portfolio out{held.assets.cwiseProduct((1.0 + asset_returns.array()).matrix()), held.cash};
    const double total = out.total();
    if (total > 0.0) {
        out.assets /= total;
        out.cash /= total;
    }
    return out;
}

double drifted_turnover(const Portfolio& target, const Portfolio& held, const Vector& asset_returns) {
    const Portfolio d = drift(held, asset_returns);
    return (target.assets - d.assets).cwiseAbs().sum() + std::abs(target.cash - d.cash);
}

double BacktestResult::total_cost() const {
    double s = 0.0;
    for (double c : cost) s += c;
    return s;
}

BacktestResult run(const PriceTable& prices, const FeatureTable& features, const RunConfig& cfg) {
    if (prices.periods() == 0) throw Error("empty range: no price rows to backtest");
    prices.validate();
    const Eigen::Index k = prices.asset_count();
    if (static_cast<double>(k) * cfg.w_max + cfg.c_max < 1.0)
        throw Error("constraint set infeasible for K*w_max + c_max < 1 with K=" + std::to_string(k));

    const FeatureTable aligned = features.empty() ? FeatureTable{} : align_features(features, prices.dates);
    const auto policy = make_policy_set(cfg.agents);

    BacktestResult res;
    res.assets = prices.assets;
    res.trace.header.assets = prices.assets;
    res.trace.header.periods = static_cast<long>(prices.periods());

    BacktestState state;
    Portfolio held = Portfolio::all_cash(k);
    std::optional<Vector> last_returns;
    const double rate = cfg.bps * 1e-4;

    for (Eigen::Index t = 0; t < prices.periods(); ++t) {
        StepResult s = step(state, prices, aligned, t, *policy, cfg);
        TraceRecord& rec = s.record;
        rec.period = static_cast<long>(t);
        res.dates.push_back(prices.dates[static_cast<std::size_t>(t)]);
        res.executed.push_back(rec.executed);

        if (s.next_returns) {
            const Vector& r = *s.next_returns;
            const double turnover = last_returns ? drifted_turnover(rec.executed, held, *last_returns)
                                                 : (rec.executed.assets - held.assets).cwiseAbs().sum() +
                                                       std::abs(rec.executed.cash - held.cash);
            const double gross = rec.executed.assets.dot(r);
            const double cost = rate * turnover;
            const double net = gross - cost;
            state.equity.push_back(state.equity.back() * (1.0 + net));
            rec.realized = Realized{gross, turnover, cost, net, state.equity.back()};

            res.gross.push_back(gross);
            res.turnover.push_back(turnover);
            res.cost.push_back(cost);
            res.returns.push_back(net);
            res.equity.push_back(state.equity.back());
            res.benchmark.push_back(r.mean());
            for (std::size_t i = 0; i < 7; ++i) res.coalition_returns[i].push_back(s.coalition_portfolios[i].assets.dot(r));

            held = rec.executed;
            last_returns = r;
        }
        res.trace.records.push_back(std::move(rec));
    }

    if (!res.returns.empty()) {
        const double ann = cfg.value.annualization;
        res.metrics = compute_metrics(res.returns, res.benchmark, ann);
        res.benchmark_metrics = compute_metrics(res.benchmark, res.benchmark, ann);
        for (std::size_t i = 0; i < 7; ++i)
            res.coalition_metrics[i] = compute_metrics(res.coalition_returns[i], res.benchmark, ann);
    }
    return res;
}

namespace {

nlohmann::json metrics_json(const Metrics& m) {
    return {{"cr", m.cr},           {"sr", m.sr},
            {"sr_flag", std::string(to_string(m.sr_flag))},
            {"mdd", m.mdd},         {"ir", m.ir},
            {"ir_flag", std::string(to_string(m.ir_flag))},
            {"periods", m.periods}};
}

std::string fmt(double v) {
    char buf[32];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

}  // namespace

void write_summary(const std::filesystem::path& path, const BacktestResult& result, const RunConfig& cfg) {
    using nlohmann::json;
    json coalitions = json::object();
    const std::array<const char*, 7> labels{"1", "2", "3", "12", "13", "23", "123"};
    for (std::size_t i = 0; i < 7; ++i) coalitions[labels[i]] = metrics_json(result.coalition_metrics[i]);

    std::array<double, 3> cash_sum{};
    std::array<long, 3> days{};
    double all_cash = 0.0;
    for (const auto& r : result.trace.records) {
        const auto l = static_cast<std::size_t>(r.regime.label);
        cash_sum[l] += r.executed.cash;
        ++days[l];
        all_cash += r.executed.cash;
    }
    json mean_cash = json::object(), regime_days = json::object();
    for (Regime reg : kAllRegimes) {
        const auto l = static_cast<std::size_t>(reg);
        mean_cash[std::string(to_string(reg))] = days[l] ? cash_sum[l] / static_cast<double>(days[l]) : 0.0;
        regime_days[std::string(to_string(reg))] = days[l];
    }
    mean_cash["all"] = result.trace.records.empty() ? 0.0 : all_cash / static_cast<double>(result.trace.records.size());

    const json j = {
        {"schema", "mrc.summary"},
        {"version", 1},
        {"first_date", result.dates.empty() ? "" : format_date(result.dates.front())},
        {"last_date", result.dates.empty() ? "" : format_date(result.dates.back())},
        {"decision_periods", result.dates.size()},
        {"realized_periods", result.returns.size()},
        {"bps", cfg.bps},
        {"total_cost", result.total_cost()},
        {"metrics", metrics_json(result.metrics)},
        {"benchmark", metrics_json(result.benchmark_metrics)},
        {"coalitions", coalitions},
        {"mean_cash", mean_cash},
        {"regime_days", regime_days},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write summary: " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing summary: " + path.string());
}

void write_equity_csv(const std::filesystem::path& path, const BacktestResult& result) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write equity table: " + path.string());
    out << "date,gross,turnover,cost,net,equity,benchmark_equity,cash\n";
    double bench = 1.0;
    for (std::size_t i = 0; i < result.returns.size(); ++i) {
        bench *= 1.0 + result.benchmark[i];
        out << format_date(result.dates[i]) << ',' << fmt(result.gross[i]) << ',' << fmt(result.turnover[i]) << ','
            << fmt(result.cost[i]) << ',' << fmt(result.returns[i]) << ',' << fmt(result.equity[i]) << ','
            << fmt(bench) << ',' << fmt(result.executed[i].cash) << '\n';
    }
    if (!out) throw Error("failed writing equity table: " + path.string());
}

}  // namespace mrc
