#pragma once

// Five-layer per-period causal trace and its line-delimited JSON encoding.
// The first line is a header record; each following line is one period.

#include "mrc/agents.hpp"
#include "mrc/overlays.hpp"
#include "mrc/regime.hpp"
#include "mrc/types.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mrc {

inline constexpr int kTraceVersion = 1;
inline constexpr std::string_view kTraceSchema = "mrc.trace";

struct Realized {
    double gross = 0.0;
    double turnover = 0.0;
    double cost = 0.0;
    double net = 0.0;
    double equity = 0.0;

    friend bool operator==(const Realized&, const Realized&) = default;
};

struct TraceRecord {
    long period = 0;
    std::string date;

    // 1: raw signals
    RegimeState regime;
    double r30 = 0.0, sigma30 = 0.0, r7 = 0.0;
    double btc_minus_alts = 0.0;
    std::optional<double> onchain_diff;
    double drawdown = 0.0;
    bool partial = false;

    // 2: coalition outputs in (1, 2, 3, 12, 13, 23, 123) order
    std::array<AgentDecision, 7> coalitions;

    // 3: credit
    std::array<double, 7> values{};
    Vector phi, omega, omega_tilde, pairwise;
    bool wta = false;
    int dominant = -1;
    std::vector<std::optional<double>> rolling_sharpe;

    // 4: blend
    double v_s1 = 0.0, v_s2 = 0.0;
    double beta_s1 = 0.0, beta_gc = 0.0, beta_gc_final = 0.0, kappa = 0.0;

    // 5: overlays and execution
    Portfolio council;
    Portfolio smoothed;
    OverlayTrace overlays;
    Portfolio executed;
    std::optional<Realized> realized;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

struct TraceHeader {
    std::string schema{kTraceSchema};
    int version = kTraceVersion;
    std::vector<std::string> assets;
    long periods = 0;

    friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

struct TraceFile {
    TraceHeader header;
    std::vector<TraceRecord> records;

    friend bool operator==(const TraceFile&, const TraceFile&) = default;
};

std::string encode_record(const TraceRecord& r);
TraceRecord decode_record(std::string_view line);

void write_trace(std::ostream& out, const TraceFile& trace);
void write_trace(const std::filesystem::path& path, const TraceFile& trace);
TraceFile read_trace(std::istream& in);
TraceFile read_trace(const std::filesystem::path& path);

// Human-readable rendering of one record.
std::string render_record(const TraceRecord& r, const std::vector<std::string>& assets);

}  // namespace mrc
