#pragma once

// Deterministic three-regime market used by the bundled dataset and the
// acceptance runs: a trending bull third, a range-bound volatile third and a
// trending bear third, with matching on-chain and macro feature series.

#include "mrc/market_data.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mrc {

struct SyntheticSpec {
    std::vector<std::string> assets{"BTC", "ETH", "ADA", "LINK", "DOGE", "XLM", "XRP",
                                    "BCH", "TRX", "ZEC", "PAXG", "BNB", "SOL"};
    std::string start = "2023-01-01";
    int segment_days = 240;
    std::uint64_t seed = 20230101;
};

struct SyntheticData {
    PriceTable prices;
    FeatureTable features;      // forward-filled, as the loader would produce
    FeatureTable raw_features;  // as written to disk, weekend macro gaps left empty
    // Row ranges [first, last) of the bull, volatile and bear segments.
    std::array<std::pair<Eigen::Index, Eigen::Index>, 3> segments;
};

SyntheticData make_synthetic(const SyntheticSpec& spec = {});

// Standard normals via Box-Muller on raw mt19937_64 output. The standard
// distributions are implementation-defined; this stream is not.
class PortableNormal {
public:
    explicit PortableNormal(std::uint64_t seed) : engine_(seed) {}
    double operator()();

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
    double uniform();  // (0, 1)
};

}  // namespace mrc
