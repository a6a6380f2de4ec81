#include "cli.hpp"

#include "mrc/backtester.hpp"
#include "mrc/config.hpp"
#include "mrc/shapley.hpp"
#include "mrc/synthetic.hpp"
#include "mrc/trace.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace mrc::cli {

namespace {

namespace fs = std::filesystem;

std::string metric(double v, RatioFlag flag) {
    if (flag != RatioFlag::Finite) return std::string(to_string(flag));
    std::ostringstream os;
    os << std::fixed << std::setprecision(4) << v;
    return os.str();
}

struct BacktestFlags {
    std::string prices, features, config, from, to, out, dump;
    std::optional<double> bps;
};

int cmd_backtest(const BacktestFlags& f, std::ostream& out) {
    RunConfig cfg;
    if (!f.config.empty()) cfg = load_config(f.config);
    if (!f.prices.empty()) cfg.prices = f.prices;
    if (!f.features.empty()) cfg.features = f.features;
    if (!f.from.empty()) cfg.from = f.from;
    if (!f.to.empty()) cfg.to = f.to;
    if (!f.out.empty()) cfg.out = f.out;
    if (f.bps) cfg.bps = *f.bps;
    cfg.finalize();
    if (cfg.prices.empty()) throw Error("price table not found: no --prices given");

    const PriceTable prices = load_prices(cfg.prices, cfg.range(), cfg.fill_limit);
    const FeatureTable features = cfg.features.empty() ? FeatureTable{} : load_features(cfg.features, cfg.fill_limit);
    const BacktestResult res = run(prices, features, cfg);

    const fs::path dir = cfg.out;
    fs::create_directories(dir);
    {
        std::ofstream c(dir / "config.txt", std::ios::binary);
        c << dump_config(cfg);
        if (!c) throw Error("cannot write " + (dir / "config.txt").string());
    }
    write_trace(dir / "trace.jsonl", res.trace);
    write_equity_csv(dir / "equity.csv", res);
    write_summary(dir / "summary.json", res, cfg);

    const Metrics& m = res.metrics;
    out << "periods " << res.dates.size() << " (" << res.returns.size() << " realized)\n"
        << "CR  " << metric(m.cr, RatioFlag::Finite) << '\n'
        << "SR  " << metric(m.sr, m.sr_flag) << '\n'
        << "MDD " << metric(m.mdd, RatioFlag::Finite) << '\n'
        << "IR  " << metric(m.ir, m.ir_flag) << '\n'
        << "wrote " << (dir / "summary.json").string() << '\n';
    return kOk;
}

std::vector<double> parse_game(const std::string& text) {
    std::vector<double> v;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto next = std::min(text.find(',', pos), text.size());
        const std::string cell = text.substr(pos, next - pos);
        double x = 0.0;
        const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
        if (cell.empty() || ec != std::errc{} || p != cell.data() + cell.size())
            throw CLI::ValidationError("--game", "not a number: '" + cell + "'");
        v.push_back(x);
        pos = next + 1;
    }
    if (v.size() != 7)
        throw CLI::ValidationError("--game", "expected 7 values v1,v2,v3,v12,v13,v23,v123 (got " +
                                                 std::to_string(v.size()) + ")");
    return v;
}

int cmd_shapley(const std::vector<double>& v, std::ostream& out) {
    std::array<double, 7> a{};
    std::copy(v.begin(), v.end(), a.begin());
    const auto game = CharacteristicGame<double>::three_player(a);
    const auto credit = shapley_closed3(game);
    const auto report = axiom_check(game, credit);
    auto row = [&](const char* name, const Vector& x) {
        out << std::left << std::setw(10) << name;
        for (Eigen::Index i = 0; i < x.size(); ++i) out << ' ' << std::setprecision(12) << x(i);
        out << '\n';
    };
    row("phi", credit.phi);
    row("weights", credit.weights);
    out << "efficiency residual " << report.efficiency_residual << (report.efficiency_ok() ? " ok" : " FAIL") << '\n';
    out << "symmetry   residual " << report.symmetry_residual << (report.symmetry_ok() ? " ok" : " FAIL");
    for (const auto& [i, j] : report.symmetric_pairs) out << "  (" << i + 1 << ',' << j + 1 << ')';
    out << '\n' << "dummy      residual " << report.dummy_residual << (report.dummy_ok() ? " ok" : " FAIL");
    for (int d : report.dummies) out << "  " << d + 1;
    out << '\n'
        << "additivity residual " << report.additivity_residual << (report.additivity_ok() ? " ok" : " FAIL") << '\n';
    return kOk;
}

int cmd_report(const std::string& path, long period, std::ostream& out, std::ostream& err) {
    const TraceFile trace = read_trace(path);
    const auto n = static_cast<long>(trace.records.size());
    if (period < 0 || period >= n) {
        err << "error: period " << period << " out of range [0, " << n << ")\n";
        return kFailure;
    }
    out << render_record(trace.records[static_cast<std::size_t>(period)], trace.header.assets);
    return kOk;
}

int cmd_synth(const std::string& dir, std::uint64_t seed, int segment_days, std::ostream& out) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.segment_days = segment_days;
    const SyntheticData data = make_synthetic(spec);
    fs::create_directories(dir);
    write_prices_csv(fs::path(dir) / "prices.csv", data.prices);
    write_features_csv(fs::path(dir) / "features.csv", data.raw_features);
    out << "wrote " << data.prices.periods() << " days x " << data.prices.asset_count() << " assets to " << dir << '\n';
    return kOk;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Regime-aware council backtester with online Shapley credit"};
    app.require_subcommand(1);

    BacktestFlags bt;
    auto* backtest = app.add_subcommand("backtest", "run a backtest and write summary, trace and equity table");
    backtest->add_option("--prices", bt.prices, "price CSV: date,ASSET1,...");
    backtest->add_option("--features", bt.features, "feature CSV: date,ASSET.metric,...,MACRO,...");
    backtest->add_option("--config", bt.config, "flat key = value config file");
    backtest->add_option("--from", bt.from, "first date, YYYY-MM-DD");
    backtest->add_option("--to", bt.to, "last date, YYYY-MM-DD");
    backtest->add_option("--bps", bt.bps, "one-way cost per unit turnover, basis points");
    backtest->add_option("--out", bt.out, "output directory");

    std::string game_text;
    auto* shapley = app.add_subcommand("shapley", "exact three-player Shapley values and axiom report");
    shapley->add_option("--game", game_text, "v1,v2,v3,v12,v13,v23,v123")->required();

    std::string trace_path;
    long period = 0;
    auto* report = app.add_subcommand("report", "render one period of a trace");
    report->add_option("--trace", trace_path, "trace.jsonl from a backtest")->required();
    report->add_option("--period", period, "0-based period index")->required();

    std::string synth_dir = "data";
    std::uint64_t seed = SyntheticSpec{}.seed;
    int segment_days = SyntheticSpec{}.segment_days;
    auto* synth = app.add_subcommand("synth", "write the synthetic three-regime dataset");
    synth->add_option("--out", synth_dir, "output directory");
    synth->add_option("--seed", seed, "generator seed");
    synth->add_option("--segment-days", segment_days, "days per regime segment");

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    if (argv.empty()) argv.push_back("mrc");

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (*shapley) return cmd_shapley(parse_game(game_text), out);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*backtest) return cmd_backtest(bt, out);
        if (*report) return cmd_report(trace_path, period, out, err);
        if (*synth) return cmd_synth(synth_dir, seed, segment_days, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace mrc::cli
