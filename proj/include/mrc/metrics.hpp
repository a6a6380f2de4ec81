#pragma once

#include "mrc/types.hpp"

#include <span>

namespace mrc {

// Marks a ratio whose denominator vanished: the value is then +/-inf (or 0
// when the numerator vanished too) and the flag says which.
enum class RatioFlag { Finite, PosInf, NegInf };

std::string_view to_string(RatioFlag f);

struct Metrics {
    double cr = 0.0;   // compounded return
    double sr = 0.0;   // annualised Sharpe, risk-free 0
    double mdd = 0.0;  // worst peak-to-trough fraction, initial equity 1
    double ir = 0.0;   // mean / std of active return
    RatioFlag sr_flag = RatioFlag::Finite;
    RatioFlag ir_flag = RatioFlag::Finite;
    long periods = 0;

    friend bool operator==(const Metrics&, const Metrics&) = default;
};

// Sample standard deviations; sqrt(annualization) scaling for the Sharpe ratio.
Metrics compute_metrics(std::span<const double> returns, std::span<const double> benchmark,
                        double annualization = 365.0);

double compounded_return(std::span<const double> returns);
double max_drawdown(std::span<const double> returns);

}  // namespace mrc
