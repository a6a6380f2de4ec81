#include "mrc/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace mrc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool is_missing(std::string_view cell) {
    return cell.empty() || cell == "NaN" || cell == "nan" || cell == "NA" || cell == "null";
}

double parse_number(std::string_view cell, std::size_t line, std::size_t col) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw Error("unparseable cell '" + std::string(cell) + "' at line " + std::to_string(line) + ", column " +
                    std::to_string(col + 1));
    return v;
}

struct RawTable {
    std::vector<std::string> columns;
    std::vector<Date> dates;
    std::vector<std::vector<double>> rows;  // NaN for missing
};

RawTable parse_raw(std::string_view csv) {
    RawTable raw;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header = true;
    while (pos <= csv.size()) {
        const auto nl = csv.find('\n', pos);
        std::string_view line = csv.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? csv.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto cells = split(line, ',');
        if (header) {
            if (cells.size() < 2) throw Error("header must name a date column and at least one series");
            for (std::size_t i = 1; i < cells.size(); ++i) {
                if (cells[i].empty()) throw Error("empty column name in header");
                raw.columns.emplace_back(cells[i]);
            }
            header = false;
            continue;
        }
        if (cells.size() != raw.columns.size() + 1)
            throw Error("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                        " cells, expected " + std::to_string(raw.columns.size() + 1));
        Date d;
        try {
            d = parse_date(cells[0]);
        } catch (const Error&) {
            throw Error("unparseable date '" + std::string(cells[0]) + "' at line " + std::to_string(line_no));
        }
        if (!raw.dates.empty() && d <= raw.dates.back())
            throw Error("dates must be strictly increasing (line " + std::to_string(line_no) + ")");
        std::vector<double> row(raw.columns.size(), kNaN);
        for (std::size_t c = 0; c < raw.columns.size(); ++c)
            if (!is_missing(cells[c + 1])) row[c] = parse_number(cells[c + 1], line_no, c + 1);
        raw.dates.push_back(d);
        raw.rows.push_back(std::move(row));
    }
    if (header) throw Error("empty table");
    return raw;
}

// Expands to a daily calendar, carrying each column's last observation for at
// most fill_limit days. Cells that cannot be filled stay NaN.
struct Filled {
    std::vector<Date> dates;
    Matrix values;
    Eigen::MatrixXi age;
};

Filled fill_calendar(const RawTable& raw, int fill_limit) {
    Filled f;
    const auto ncol = static_cast<Eigen::Index>(raw.columns.size());
    if (raw.dates.empty()) {
        f.values.resize(0, ncol);
        f.age.resize(0, ncol);
        return f;
    }
    const auto days = (raw.dates.back() - raw.dates.front()).count() + 1;
    f.values = Matrix::Constant(days, ncol, kNaN);
    f.dates.reserve(static_cast<std::size_t>(days));
    for (long i = 0; i < days; ++i) f.dates.push_back(raw.dates.front() + std::chrono::days(i));
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        const auto row = (raw.dates[r] - raw.dates.front()).count();
        for (Eigen::Index c = 0; c < ncol; ++c) f.values(row, c) = raw.rows[r][static_cast<std::size_t>(c)];
    }
    f.age = Eigen::MatrixXi::Constant(days, ncol, -1);
    for (Eigen::Index c = 0; c < ncol; ++c) {
        long last = -1;
        for (Eigen::Index i = 0; i < days; ++i) {
            if (!std::isnan(f.values(i, c))) {
                last = static_cast<long>(i);
                f.age(i, c) = 0;
                continue;
            }
            if (last >= 0 && i - last <= fill_limit) {
                f.values(i, c) = f.values(last, c);
                f.age(i, c) = static_cast<int>(i - last);
            }
        }
    }
    return f;
}

}  // namespace

Date parse_date(std::string_view iso) {
    iso = trim(iso);
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::string_view s, auto& out) {
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && p == s.data() + s.size();
    };
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-' || !num(iso.substr(0, 4), y) || !num(iso.substr(5, 2), m) ||
        !num(iso.substr(8, 2), d))
        throw Error("invalid ISO-8601 date '" + std::string(iso) + "'");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) throw Error("invalid calendar date '" + std::string(iso) + "'");
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    std::ostringstream os;
    os << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
       << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << static_cast<unsigned>(ymd.day());
    return os.str();
}

std::optional<Eigen::Index> PriceTable::index_of(std::string_view asset) const {
    const auto it = std::find(assets.begin(), assets.end(), asset);
    if (it == assets.end()) return std::nullopt;
    return static_cast<Eigen::Index>(it - assets.begin());
}

Vector PriceTable::next_returns(Eigen::Index t) const {
    if (t < 0 || t + 1 >= periods()) throw Error("no next-day prices after period " + std::to_string(t));
    return (close.row(t + 1).array() / close.row(t).array() - 1.0).matrix().transpose();
}

PriceTable PriceTable::truncated(Eigen::Index last) const {
    if (last < 0 || last >= periods()) throw Error("truncation index out of range");
    PriceTable out;
    out.dates.assign(dates.begin(), dates.begin() + last + 1);
    out.assets = assets;
    out.close = close.topRows(last + 1);
    return out;
}

void PriceTable::validate() const {
    if (assets.size() < 2) throw Error("price table needs at least 2 assets");
    if (dates.empty()) throw Error("price table has no rows in the requested range");
    if (close.rows() != periods() || close.cols() != asset_count()) throw Error("price matrix shape mismatch");
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (dates[i] <= dates[i - 1]) throw Error("price dates must be strictly increasing");
    if (!(close.array() > 0.0).all() || !close.allFinite()) throw Error("prices must be positive and finite");
}

std::optional<Eigen::Index> FeatureTable::column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) return std::nullopt;
    return static_cast<Eigen::Index>(it - columns.begin());
}

PriceTable parse_prices(std::string_view csv, const DateRange& range, int fill_limit) {
    const RawTable raw = parse_raw(csv);
    if (raw.columns.size() < 2) throw Error("price table needs at least 2 assets");
    for (const auto& row : raw.rows)
        for (double v : row)
            if (!std::isnan(v) && !(v > 0.0)) throw Error("prices must be positive");

    const Filled f = fill_calendar(raw, fill_limit);
    PriceTable out;
    out.assets = raw.columns;
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < f.dates.size(); ++i)
        if (range.contains(f.dates[i])) keep.push_back(static_cast<Eigen::Index>(i));
    // Holes are checked over the whole file so a range boundary cannot hide one.
    for (Eigen::Index c = 0; c < f.values.cols(); ++c) {
        for (Eigen::Index i = 0; i < f.values.rows(); ++i) {
            if (!std::isnan(f.values(i, c))) continue;
            const bool leading = !f.values.col(c).head(i).array().isFinite().any();
            if (leading)
                throw Error("missing price for " + raw.columns[static_cast<std::size_t>(c)] + " on " +
                            format_date(f.dates[static_cast<std::size_t>(i)]));
            throw Error("gap exceeds fill limit of " + std::to_string(fill_limit) + " days for " +
                        raw.columns[static_cast<std::size_t>(c)] + " at " +
                        format_date(f.dates[static_cast<std::size_t>(i)]));
        }
    }
    out.close.resize(static_cast<Eigen::Index>(keep.size()), f.values.cols());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        out.dates.push_back(f.dates[static_cast<std::size_t>(keep[r])]);
        out.close.row(static_cast<Eigen::Index>(r)) = f.values.row(keep[r]);
    }
    out.validate();
    return out;
}

PriceTable load_prices(const std::filesystem::path& path, const DateRange& range, int fill_limit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("price table not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_prices(ss.str(), range, fill_limit);
}

namespace {

std::vector<std::optional<Eigen::Index>> first_valid_rows(const Matrix& values) {
    std::vector<std::optional<Eigen::Index>> out(static_cast<std::size_t>(values.cols()));
    for (Eigen::Index c = 0; c < values.cols(); ++c)
        for (Eigen::Index i = 0; i < values.rows(); ++i)
            if (!std::isnan(values(i, c))) {
                out[static_cast<std::size_t>(c)] = i;
                break;
            }
    return out;
}

}  // namespace

FeatureTable parse_features(std::string_view csv, int fill_limit) {
    const RawTable raw = parse_raw(csv);
    const Filled f = fill_calendar(raw, fill_limit);
    FeatureTable out;
    out.columns = raw.columns;
    out.dates = f.dates;
    out.values = f.values;
    out.age = f.age;
    out.first_valid = first_valid_rows(out.values);
    return out;
}

FeatureTable load_features(const std::filesystem::path& path, int fill_limit) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("feature table not found: " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_features(ss.str(), fill_limit);
}

FeatureTable align_features(const FeatureTable& features, std::span<const Date> dates) {
    FeatureTable out;
    out.columns = features.columns;
    out.dates.assign(dates.begin(), dates.end());
    out.values = Matrix::Constant(static_cast<Eigen::Index>(dates.size()), static_cast<Eigen::Index>(features.columns.size()), kNaN);
    out.age = Eigen::MatrixXi::Constant(out.values.rows(), out.values.cols(), -1);
    std::map<Date, Eigen::Index> rows;
    for (std::size_t i = 0; i < features.dates.size(); ++i) rows.emplace(features.dates[i], static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < dates.size(); ++i) {
        const auto it = rows.find(dates[i]);
        if (it == rows.end()) continue;
        out.values.row(static_cast<Eigen::Index>(i)) = features.values.row(it->second);
        out.age.row(static_cast<Eigen::Index>(i)) = features.age.row(it->second);
    }
    out.first_valid = first_valid_rows(out.values);
    return out;
}

FeatureTable forward_fill(const FeatureTable& features, int fill_limit) {
    FeatureTable out = features;
    for (Eigen::Index c = 0; c < out.values.cols(); ++c) {
        std::optional<Eigen::Index> last;
        for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
            if (!std::isnan(out.values(i, c))) {
                last = i;
                continue;
            }
            if (!last) continue;
            const auto gap = (out.dates[static_cast<std::size_t>(i)] - out.dates[static_cast<std::size_t>(*last)]).count();
            const auto age = out.age(*last, c) + gap;
            if (age <= fill_limit) {
                out.values(i, c) = out.values(*last, c);
                out.age(i, c) = static_cast<int>(age);
            }
        }
    }
    out.first_valid = first_valid_rows(out.values);
    return out;
}

namespace {

void write_table(const std::filesystem::path& path, const std::vector<Date>& dates, const std::vector<std::string>& cols,
                 const Matrix& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << "date";
    for (const auto& c : cols) out << ',' << c;
    out << '\n';
    char buf[64];
    for (std::size_t i = 0; i < dates.size(); ++i) {
        out << format_date(dates[i]);
        for (Eigen::Index c = 0; c < values.cols(); ++c) {
            out << ',';
            const double v = values(static_cast<Eigen::Index>(i), c);
            if (std::isnan(v)) continue;
            const auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
            out.write(buf, p - buf);
        }
        out << '\n';
    }
}

}  // namespace

void write_prices_csv(const std::filesystem::path& path, const PriceTable& prices) {
    write_table(path, prices.dates, prices.assets, prices.close);
}

void write_features_csv(const std::filesystem::path& path, const FeatureTable& features) {
    write_table(path, features.dates, features.columns, features.values);
}

Vector cross_sectional_z(const Vector& x) {
    if (x.size() == 0) return x;
    const double mean = x.mean();
    const double sd = std::sqrt((x.array() - mean).square().mean());
    if (!(sd > 1e-15)) return Vector::Zero(x.size());
    Vector z = (x.array() - mean) / sd;
    // remove the rounding residue so the cross-sectional mean is ~0
    z.array() -= z.mean();
    return z;
}

namespace {

double sample_std(const Eigen::Ref<const Vector>& x) {
    if (x.size() < 2) return 0.0;
    const double mean = x.mean();
    return std::sqrt((x.array() - mean).square().sum() / static_cast<double>(x.size() - 1));
}

// Time-series z-score of column c at row t against the trailing window.
std::optional<double> trailing_z(const Matrix& values, Eigen::Index c, Eigen::Index t, int window) {
    const double now = values(t, c);
    if (std::isnan(now)) return std::nullopt;
    std::vector<double> obs;
    for (Eigen::Index i = std::max<Eigen::Index>(0, t - window + 1); i <= t; ++i)
        if (!std::isnan(values(i, c))) obs.push_back(values(i, c));
    if (obs.size() < 2) return 0.0;
    const Eigen::Map<const Vector> v(obs.data(), static_cast<Eigen::Index>(obs.size()));
    const double sd = sample_std(v);
    if (!(sd > 0.0)) return 0.0;
    return (now - v.mean()) / sd;
}

}  // namespace

MarketSnapshot snapshot(const PriceTable& prices, const FeatureTable& features, Eigen::Index t,
                        const SnapshotConfig& cfg) {
    if (t < 0 || t >= prices.periods())
        throw Error("period " + std::to_string(t) + " out of range [0, " + std::to_string(prices.periods()) + ")");
    const Eigen::Index k = prices.asset_count();
    const Matrix& px = prices.close;

    MarketSnapshot s;
    s.t = t;
    s.date = prices.dates[static_cast<std::size_t>(t)];
    s.partial = t < 30;

    auto horizon = [&](Eigen::Index n, Vector& simple, Vector& logr) {
        const Eigen::Index back = std::max<Eigen::Index>(0, t - n);
        const Eigen::ArrayXd ratio = px.row(t).array() / px.row(back).array();
        simple = (ratio - 1.0).matrix().transpose();
        logr = ratio.log().matrix().transpose();
    };
    horizon(1, s.ret1, s.log1);
    horizon(7, s.ret7, s.log7);
    horizon(30, s.ret30, s.log30);

    const Eigen::Index n30 = std::min<Eigen::Index>(30, t);
    s.vol30 = Vector::Zero(k);
    Vector ew_daily = Vector::Zero(n30);
    if (n30 > 0) {
        const Matrix window = px.middleRows(t - n30, n30 + 1);
        const Matrix daily_log = (window.bottomRows(n30).array() / window.topRows(n30).array()).log().matrix();
        for (Eigen::Index a = 0; a < k; ++a) s.vol30(a) = sample_std(daily_log.col(a));
        const Matrix daily_simple = (window.bottomRows(n30).array() / window.topRows(n30).array() - 1.0).matrix();
        ew_daily = (daily_simple.rowwise().mean().array() + 1.0).log().matrix();
    }
    s.ew_log_30 = ew_daily.sum();
    s.ew_log_7 = ew_daily.tail(std::min<Eigen::Index>(7, n30)).sum();
    s.ew_vol_30 = sample_std(ew_daily);
    s.z30 = cross_sectional_z(s.ret30);

    if (const auto btc = prices.index_of(cfg.btc); btc && k > 1) {
        const double alts = (s.ret30.sum() - s.ret30(*btc)) / static_cast<double>(k - 1);
        s.btc_minus_alts_30 = s.ret30(*btc) - alts;
    }

    s.onchain_z = Vector::Constant(k, kNaN);
    Vector activity = Vector::Constant(k, kNaN);
    const bool aligned = features.values.rows() == prices.periods() && !features.columns.empty();
    if (aligned) {
        for (Eigen::Index a = 0; a < k; ++a) {
            const std::string prefix = prices.assets[static_cast<std::size_t>(a)] + ".";
            double all_sum = 0.0, act_sum = 0.0;
            int all_n = 0, act_n = 0;
            for (std::size_t c = 0; c < features.columns.size(); ++c) {
                const auto& name = features.columns[c];
                if (name.rfind(prefix, 0) != 0) continue;
                const auto z = trailing_z(features.values, static_cast<Eigen::Index>(c), t, cfg.feature_window);
                if (!z) continue;
                all_sum += *z;
                ++all_n;
                const std::string metric = name.substr(prefix.size());
                if (std::find(cfg.activity_metrics.begin(), cfg.activity_metrics.end(), metric) !=
                    cfg.activity_metrics.end()) {
                    act_sum += *z;
                    ++act_n;
                }
            }
            if (all_n > 0) s.onchain_z(a) = all_sum / all_n;
            if (act_n > 0) activity(a) = act_sum / act_n;
        }
        s.has_onchain = !s.onchain_z.array().isNaN().all();
        if (const auto btc = prices.index_of(cfg.btc); btc && !std::isnan(activity(*btc))) {
            double sum = 0.0;
            int n = 0;
            for (Eigen::Index a = 0; a < k; ++a)
                if (a != *btc && !std::isnan(activity(a))) {
                    sum += activity(a);
                    ++n;
                }
            if (n > 0) s.onchain_btc_diff = activity(*btc) - sum / n;
        }
        for (std::size_t c = 0; c < features.columns.size(); ++c) {
            if (features.columns[c].find('.') != std::string::npos) continue;
            if (const auto z = trailing_z(features.values, static_cast<Eigen::Index>(c), t, cfg.feature_window))
                s.macro_z.emplace_back(features.columns[c], *z);
        }
    }
    return s;
}

double engagement_weight(const SentimentObservation& obs) {
    return std::log(1.0 + obs.likes + obs.reposts + obs.views / 100.0) + 1.0;
}

double sentiment_score(std::span<const SentimentObservation> observations) {
    if (observations.empty()) throw Error("no sentiment observations");
    double num = 0.0, den = 0.0;
    for (const auto& o : observations) {
        if (o.label < -1 || o.label > 1) throw Error("sentiment label must be -1, 0 or +1");
        if (!(o.confidence > 0.0 && o.confidence <= 1.0)) throw Error("sentiment confidence must lie in (0, 1]");
        const double w = engagement_weight(o);
        num += o.label * o.confidence * w;
        den += w;
    }
    return num / den;
}

double prediction_market_score(double mean_probability) {
    if (!(mean_probability >= 0.0 && mean_probability <= 1.0)) throw Error("probability must lie in [0, 1]");
    return (mean_probability - 0.5) * 2.0;
}

}  // namespace mrc
