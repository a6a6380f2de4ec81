#pragma once

// Flat `key = value` run configuration. Every key has a compiled-in default;
// unknown keys and out-of-range values are rejected before any computation.

#include "mrc/adaptive_weights.hpp"
#include "mrc/agents.hpp"
#include "mrc/council.hpp"
#include "mrc/ewp.hpp"
#include "mrc/market_data.hpp"
#include "mrc/overlays.hpp"
#include "mrc/regime.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mrc {

struct RunConfig {
    CharValueParams value;
    MixtureConfig mixture;
    RegimeConfig regime;
    MultiplierAnchors anchors = MultiplierAnchors::defaults();
    BlendConfig blend;
    OverlayConfig overlay;
    AgentConfig agents;
    SnapshotConfig snapshot;

    double w_max = 0.40;
    double c_max = 0.30;
    double bps = 0.0;
    std::uint64_t seed = 0;
    int fill_limit = kDefaultFillLimitDays;
    int dd_peak_window = 0;  // 0: running peak since inception

    std::string prices;
    std::string features;
    std::string from;
    std::string to;
    std::string out = "out";

    // Pushes the shared caps into the per-module configs and validates all of them.
    void finalize();
    void validate() const;

    DateRange range() const;
};

RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

// Applies one assignment; throws for unknown keys or malformed values.
void set_config_value(RunConfig& cfg, std::string_view key, std::string_view value);

// Every key with its effective value, one per line, in a stable order.
std::string dump_config(const RunConfig& cfg);
std::vector<std::string> config_keys();

}  // namespace mrc
