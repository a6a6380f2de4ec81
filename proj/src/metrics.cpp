#include "mrc/metrics.hpp"

#include <cmath>
#include <limits>

namespace mrc {

std::string_view to_string(RatioFlag f) {
    switch (f) {
        case RatioFlag::Finite: return "finite";
        case RatioFlag::PosInf: return "+inf";
        case RatioFlag::NegInf: return "-inf";
    }
    return "finite";
}

namespace {

struct Ratio {
    double value;
    RatioFlag flag;
};

Ratio mean_over_std(std::span<const double> x, double scale) {
    const auto n = static_cast<Eigen::Index>(x.size());
    const Eigen::Map<const Vector> v(x.data(), n);
    const double mean = v.mean();
    const double sd = n > 1 ? std::sqrt((v.array() - mean).square().sum() / static_cast<double>(n - 1)) : 0.0;
    if (sd > 0.0) return {scale * mean / sd, RatioFlag::Finite};
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (mean > 0.0) return {inf, RatioFlag::PosInf};
    if (mean < 0.0) return {-inf, RatioFlag::NegInf};
    return {0.0, RatioFlag::Finite};
}

}  // namespace

double compounded_return(std::span<const double> returns) {
    double g = 1.0;
    for (double r : returns) g *= 1.0 + r;
    return g - 1.0;
}

double max_drawdown(std::span<const double> returns) {
    double equity = 1.0, peak = 1.0, worst = 0.0;
    for (double r : returns) {
        equity *= 1.0 + r;
        peak = std::max(peak, equity);
        worst = std::max(worst, (peak - equity) / peak);
    }
    return worst;
}

Metrics compute_metrics(std::span<const double> returns, std::span<const double> benchmark, double annualization) {
    if (returns.empty()) throw Error("metrics need a nonempty return series");
    if (benchmark.size() != returns.size()) throw Error("benchmark length differs from the return series");
    Metrics m;
    m.periods = static_cast<long>(returns.size());
    m.cr = compounded_return(returns);
    m.mdd = max_drawdown(returns);
    const auto sr = mean_over_std(returns, std::sqrt(annualization));
    m.sr = sr.value;
    m.sr_flag = sr.flag;
    std::vector<double> active(returns.size());
    for (std::size_t i = 0; i < returns.size(); ++i) active[i] = returns[i] - benchmark[i];
    const auto ir = mean_over_std(active, 1.0);
    m.ir = ir.value;
    m.ir_flag = ir.flag;
    return m;
}

}  // namespace mrc
