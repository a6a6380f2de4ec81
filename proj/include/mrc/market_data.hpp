#pragma once

#include "mrc/types.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mrc {

using Date = std::chrono::sys_days;

Date parse_date(std::string_view iso);
std::string format_date(Date d);

struct DateRange {
    std::optional<Date> from;
    std::optional<Date> to;

    bool contains(Date d) const { return (!from || d >= *from) && (!to || d <= *to); }
};

// Daily closes on a gap-free calendar; rows are dates, columns assets.
struct PriceTable {
    std::vector<Date> dates;
    std::vector<std::string> assets;
    Matrix close;

    Eigen::Index periods() const { return static_cast<Eigen::Index>(dates.size()); }
    Eigen::Index asset_count() const { return static_cast<Eigen::Index>(assets.size()); }
    std::optional<Eigen::Index> index_of(std::string_view asset) const;

    // Simple returns from row t to row t + 1.
    Vector next_returns(Eigen::Index t) const;

    // Rows [0, last].
    PriceTable truncated(Eigen::Index last) const;
    void validate() const;
};

// Named feature series; NaN marks a missing cell.
struct FeatureTable {
    std::vector<Date> dates;
    std::vector<std::string> columns;
    Matrix values;
    Eigen::MatrixXi age;  // days since the cell's value was observed; -1 when missing
    std::vector<std::optional<Eigen::Index>> first_valid;

    std::optional<Eigen::Index> column(std::string_view name) const;
    bool empty() const { return columns.empty(); }
};

inline constexpr int kDefaultFillLimitDays = 5;

// Loads `date,ASSET1,...` closes, forward-filling calendar holes of at most
// fill_limit days. Longer holes are an error, never silently filled.
PriceTable load_prices(const std::filesystem::path& path, const DateRange& range = {},
                       int fill_limit = kDefaultFillLimitDays);
PriceTable parse_prices(std::string_view csv, const DateRange& range = {}, int fill_limit = kDefaultFillLimitDays);

// Feature cells stale by more than fill_limit days become NaN.
FeatureTable load_features(const std::filesystem::path& path, int fill_limit = kDefaultFillLimitDays);
FeatureTable parse_features(std::string_view csv, int fill_limit = kDefaultFillLimitDays);

// Reindexes features onto the price calendar; dates without a row become NaN.
FeatureTable align_features(const FeatureTable& features, std::span<const Date> dates);

// Re-applies the forward-fill rule to an aligned table. Idempotent.
FeatureTable forward_fill(const FeatureTable& features, int fill_limit = kDefaultFillLimitDays);

void write_prices_csv(const std::filesystem::path& path, const PriceTable& prices);
void write_features_csv(const std::filesystem::path& path, const FeatureTable& features);

struct SnapshotConfig {
    std::string btc = "BTC";
    int feature_window = 90;
    std::vector<std::string> activity_metrics{"AdrActCnt", "TxCnt"};
};

struct MarketSnapshot {
    Eigen::Index t = 0;
    Date date{};
    bool partial = false;

    Vector ret1, ret7, ret30;  // simple returns per asset
    Vector log1, log7, log30;
    Vector vol30;              // daily log-return std
    Vector z30;                // cross-sectional z-score of ret30

    double ew_log_7 = 0.0;
    double ew_log_30 = 0.0;
    double ew_vol_30 = 0.0;
    double btc_minus_alts_30 = 0.0;

    Vector onchain_z;  // per asset, NaN when the asset has no on-chain columns
    bool has_onchain = false;
    std::optional<double> onchain_btc_diff;

    std::vector<std::pair<std::string, double>> macro_z;
};

MarketSnapshot snapshot(const PriceTable& prices, const FeatureTable& features, Eigen::Index t,
                        const SnapshotConfig& cfg = {});

// Cross-sectional z-scores with population dispersion; all zeros when flat.
Vector cross_sectional_z(const Vector& x);

struct SentimentObservation {
    int label = 0;             // -1, 0, +1
    double confidence = 1.0;   // (0, 1]
    double likes = 0.0;
    double reposts = 0.0;
    double views = 0.0;
};

// log(1 + likes + reposts + views / 100) + 1.
double engagement_weight(const SentimentObservation& obs);
double sentiment_score(std::span<const SentimentObservation> observations);
// (p - 0.5) * 2 for a mean implied probability p.
double prediction_market_score(double mean_probability);

}  // namespace mrc
