#include "mrc/synthetic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mrc {

double PortableNormal::uniform() {
    // 53 random bits, shifted off zero.
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double PortableNormal::operator()() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

namespace {

struct AssetProfile {
    double start_price;
    double beta;
    double noise;
    bool onchain;
};

AssetProfile profile(const std::string& name) {
    if (name == "BTC") return {16500.0, 1.00, 0.004, true};
    if (name == "ETH") return {1200.0, 1.15, 0.005, true};
    if (name == "ADA") return {0.25, 1.30, 0.006, true};
    if (name == "LINK") return {5.6, 1.25, 0.006, true};
    if (name == "DOGE") return {0.07, 1.40, 0.008, true};
    if (name == "XLM") return {0.072, 1.20, 0.006, true};
    if (name == "XRP") return {0.34, 1.20, 0.006, true};
    if (name == "BCH") return {97.0, 1.20, 0.006, true};
    if (name == "TRX") return {0.055, 0.80, 0.005, true};
    if (name == "ZEC") return {41.0, 1.10, 0.007, false};
    if (name == "PAXG") return {1820.0, 0.10, 0.002, false};
    if (name == "BNB") return {245.0, 1.00, 0.005, true};
    if (name == "SOL") return {10.0, 1.35, 0.008, true};
    return {10.0, 1.10, 0.006, true};
}

}  // namespace

SyntheticData make_synthetic(const SyntheticSpec& spec) {
    if (spec.segment_days < 31) throw Error("synthetic segments must span more than 30 days");
    if (spec.assets.size() < 2) throw Error("synthetic universe needs at least 2 assets");
    const Eigen::Index seg = spec.segment_days;
    const Eigen::Index n = 3 * seg;
    const auto k = static_cast<Eigen::Index>(spec.assets.size());
    PortableNormal gauss(spec.seed);

    SyntheticData data;
    data.segments = {{{0, seg}, {seg, 2 * seg}, {2 * seg, n}}};

    PriceTable& p = data.prices;
    p.assets = spec.assets;
    const Date start = parse_date(spec.start);
    for (Eigen::Index t = 0; t < n; ++t) p.dates.push_back(start + std::chrono::days(t));

    std::vector<AssetProfile> prof;
    for (const auto& a : spec.assets) prof.push_back(profile(a));

    // Market factor: drift with noise in the trends, a 10-day cycle in the range.
    constexpr double cycle = 2.0 * std::numbers::pi / 10.0;
    Matrix logp(n, k);
    for (Eigen::Index a = 0; a < k; ++a) logp(0, a) = std::log(prof[static_cast<std::size_t>(a)].start_price);
    for (Eigen::Index t = 1; t < n; ++t) {
        double m = 0.0;
        if (t < seg)
            m = 0.005 + 0.004 * gauss();
        else if (t < 2 * seg)
            m = 0.08 * (std::sin(cycle * static_cast<double>(t)) - std::sin(cycle * static_cast<double>(t - 1))) +
                0.0008 * gauss();
        else
            m = -0.005 + 0.008 * gauss();
        for (Eigen::Index a = 0; a < k; ++a) {
            const auto& pr = prof[static_cast<std::size_t>(a)];
            logp(t, a) = logp(t - 1, a) + pr.beta * m + pr.noise * gauss();
        }
    }
    p.close = logp.array().exp().matrix();

    // Features: activity follows price with a lag-free elasticity; BTC activity
    // holds up through the bear leg. Macro series only print on weekdays.
    FeatureTable raw;
    raw.dates = p.dates;
    std::vector<std::pair<Eigen::Index, double>> activity;  // (asset, elasticity)
    for (Eigen::Index a = 0; a < k; ++a) {
        if (!prof[static_cast<std::size_t>(a)].onchain) continue;
        raw.columns.push_back(spec.assets[static_cast<std::size_t>(a)] + ".AdrActCnt");
        activity.emplace_back(a, 0.6);
        raw.columns.push_back(spec.assets[static_cast<std::size_t>(a)] + ".TxCnt");
        activity.emplace_back(a, 0.4);
    }
    raw.columns.push_back("VIX");
    raw.columns.push_back("sentiment");
    const auto cols = static_cast<Eigen::Index>(raw.columns.size());
    raw.values.resize(n, cols);
    const auto btc = p.index_of("BTC");

    for (Eigen::Index t = 0; t < n; ++t) {
        const double bear_progress = t < 2 * seg ? 0.0 : static_cast<double>(t - 2 * seg) / static_cast<double>(seg);
        for (std::size_t c = 0; c < activity.size(); ++c) {
            const auto [a, elasticity] = activity[c];
            double level = elasticity * (logp(t, a) - logp(0, a)) + 0.05 * gauss();
            if (btc && a == *btc) level += 0.8 * bear_progress;
            raw.values(t, static_cast<Eigen::Index>(c)) = std::round(1e5 * std::exp(level));
        }
        double vix = 0.0, mood = 0.0;
        if (t < seg) {
            vix = 16.0 + 1.0 * gauss();
            mood = 0.4 + 0.1 * gauss();
        } else if (t < 2 * seg) {
            vix = 24.0 + 4.0 * std::abs(std::sin(cycle * static_cast<double>(t))) + 1.0 * gauss();
            mood = 0.1 * gauss();
        } else {
            vix = 22.0 + 14.0 * bear_progress + 1.0 * gauss();
            mood = -0.2 - 0.4 * bear_progress + 0.1 * gauss();
        }
        const auto wd = std::chrono::weekday(p.dates[static_cast<std::size_t>(t)]);
        const bool weekend = wd == std::chrono::Saturday || wd == std::chrono::Sunday;
        raw.values(t, cols - 2) = weekend ? std::numeric_limits<double>::quiet_NaN() : std::round(vix * 100.0) / 100.0;
        raw.values(t, cols - 1) = std::round(mood * 1e4) / 1e4;
    }
    raw.age = Eigen::MatrixXi::Zero(n, cols);
    raw.first_valid.assign(static_cast<std::size_t>(cols), std::nullopt);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index t = 0; t < n; ++t) {
            if (std::isnan(raw.values(t, c))) {
                raw.age(t, c) = -1;
            } else if (!raw.first_valid[static_cast<std::size_t>(c)]) {
                raw.first_valid[static_cast<std::size_t>(c)] = t;
            }
        }
    data.features = forward_fill(raw, kDefaultFillLimitDays);
    data.raw_features = std::move(raw);
    return data;
}

}  // namespace mrc
