#include "mrc/trace.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mrc {

using nlohmann::json;

namespace {

const std::array<const char*, 7> kCoalitionLabels{"1", "2", "3", "12", "13", "23", "123"};

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector to_vec(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json port(const Portfolio& p) { return {{"w", vec(p.assets)}, {"c", p.cash}}; }
Portfolio to_port(const json& j) { return {to_vec(j.at("w")), j.at("c").get<double>()}; }

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> to_opt(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

json header_json(const TraceHeader& h) {
    return {{"schema", h.schema}, {"version", h.version}, {"assets", h.assets}, {"periods", h.periods}};
}

TraceHeader parse_header(const json& j) {
    TraceHeader h;
    h.schema = j.at("schema").get<std::string>();
    h.version = j.at("version").get<int>();
    if (h.schema != kTraceSchema) throw Error("not a trace file: schema " + h.schema);
    if (h.version != kTraceVersion) throw Error("unsupported trace version " + std::to_string(h.version));
    h.assets = j.at("assets").get<std::vector<std::string>>();
    h.periods = j.at("periods").get<long>();
    return h;
}

}  // namespace

std::string encode_record(const TraceRecord& r) {
    json coalitions = json::array();
    for (std::size_t i = 0; i < r.coalitions.size(); ++i) {
        const auto& d = r.coalitions[i];
        coalitions.push_back({{"id", kCoalitionLabels[i]},
                              {"portfolio", port(d.portfolio)},
                              {"vote", to_string(d.vote)},
                              {"rationale", d.rationale}});
    }
    json sharpe = json::array();
    for (const auto& s : r.rolling_sharpe) sharpe.push_back(opt(s));
    json steps = json::array();
    for (const auto& s : r.overlays.steps) {
        json sig = json::array();
        for (const auto& [k, v] : s.signals) sig.push_back({k, v});
        steps.push_back({{"name", s.name},
                         {"pre", port(s.pre)},
                         {"post", port(s.post)},
                         {"active", s.active},
                         {"signals", sig},
                         {"note", s.note}});
    }
    json realized = nullptr;
    if (r.realized)
        realized = {{"gross", r.realized->gross},
                    {"turnover", r.realized->turnover},
                    {"cost", r.realized->cost},
                    {"net", r.realized->net},
                    {"equity", r.realized->equity}};

    const json j = {
        {"period", r.period},
        {"date", r.date},
        {"signals",
         {{"xi", r.regime.score},
          {"label", to_string(r.regime.label)},
          {"xi_prev", r.regime.previous_score},
          {"attenuated", r.regime.attenuated},
          {"r30", r.r30},
          {"sigma30", r.sigma30},
          {"r7", r.r7},
          {"btc_minus_alts", r.btc_minus_alts},
          {"onchain_diff", opt(r.onchain_diff)},
          {"drawdown", r.drawdown},
          {"partial", r.partial}}},
        {"coalitions", coalitions},
        {"credit",
         {{"values", r.values},
          {"phi", vec(r.phi)},
          {"omega", vec(r.omega)},
          {"omega_tilde", vec(r.omega_tilde)},
          {"pairwise", vec(r.pairwise)},
          {"wta", r.wta},
          {"dominant", r.dominant},
          {"rolling_sharpe", sharpe}}},
        {"blend",
         {{"v_s1", r.v_s1},
          {"v_s2", r.v_s2},
          {"beta_s1", r.beta_s1},
          {"beta_gc", r.beta_gc},
          {"beta_gc_final", r.beta_gc_final},
          {"kappa", r.kappa}}},
        {"execution",
         {{"council", port(r.council)},
          {"smoothed", port(r.smoothed)},
          {"overlays", steps},
          {"final", port(r.executed)},
          {"realized", realized}}},
    };
    return j.dump();
}

TraceRecord decode_record(std::string_view line) {
    const json j = json::parse(line);
    TraceRecord r;
    r.period = j.at("period").get<long>();
    r.date = j.at("date").get<std::string>();

    const auto& s = j.at("signals");
    r.regime.score = s.at("xi").get<double>();
    r.regime.label = regime_from_string(s.at("label").get<std::string>());
    r.regime.previous_score = s.at("xi_prev").get<double>();
    r.regime.attenuated = s.at("attenuated").get<bool>();
    r.r30 = s.at("r30").get<double>();
    r.sigma30 = s.at("sigma30").get<double>();
    r.r7 = s.at("r7").get<double>();
    r.btc_minus_alts = s.at("btc_minus_alts").get<double>();
    r.onchain_diff = to_opt(s.at("onchain_diff"));
    r.drawdown = s.at("drawdown").get<double>();
    r.partial = s.at("partial").get<bool>();

    const auto& co = j.at("coalitions");
    if (co.size() != r.coalitions.size()) throw Error("trace record must hold 7 coalitions");
    for (std::size_t i = 0; i < r.coalitions.size(); ++i) {
        r.coalitions[i].portfolio = to_port(co[i].at("portfolio"));
        r.coalitions[i].vote = regime_from_string(co[i].at("vote").get<std::string>());
        r.coalitions[i].rationale = co[i].at("rationale").get<std::string>();
    }

    const auto& cr = j.at("credit");
    r.values = cr.at("values").get<std::array<double, 7>>();
    r.phi = to_vec(cr.at("phi"));
    r.omega = to_vec(cr.at("omega"));
    r.omega_tilde = to_vec(cr.at("omega_tilde"));
    r.pairwise = to_vec(cr.at("pairwise"));
    r.wta = cr.at("wta").get<bool>();
    r.dominant = cr.at("dominant").get<int>();
    for (const auto& v : cr.at("rolling_sharpe")) r.rolling_sharpe.push_back(to_opt(v));

    const auto& b = j.at("blend");
    r.v_s1 = b.at("v_s1").get<double>();
    r.v_s2 = b.at("v_s2").get<double>();
    r.beta_s1 = b.at("beta_s1").get<double>();
    r.beta_gc = b.at("beta_gc").get<double>();
    r.beta_gc_final = b.at("beta_gc_final").get<double>();
    r.kappa = b.at("kappa").get<double>();

    const auto& e = j.at("execution");
    r.council = to_port(e.at("council"));
    r.smoothed = to_port(e.at("smoothed"));
    for (const auto& st : e.at("overlays")) {
        OverlayStep step;
        step.name = st.at("name").get<std::string>();
        step.pre = to_port(st.at("pre"));
        step.post = to_port(st.at("post"));
        step.active = st.at("active").get<bool>();
        for (const auto& kv : st.at("signals")) step.signals.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<double>());
        step.note = st.at("note").get<std::string>();
        r.overlays.steps.push_back(std::move(step));
    }
    r.executed = to_port(e.at("final"));
    if (const auto& re = e.at("realized"); !re.is_null())
        r.realized = Realized{re.at("gross").get<double>(), re.at("turnover").get<double>(), re.at("cost").get<double>(),
                              re.at("net").get<double>(), re.at("equity").get<double>()};
    return r;
}

void write_trace(std::ostream& out, const TraceFile& trace) {
    out << header_json(trace.header).dump() << '\n';
    for (const auto& r : trace.records) out << encode_record(r) << '\n';
}

void write_trace(const std::filesystem::path& path, const TraceFile& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write trace: " + path.string());
    write_trace(out, trace);
    if (!out) throw Error("failed writing trace: " + path.string());
}

TraceFile read_trace(std::istream& in) {
    TraceFile f;
    std::string line;
    if (!std::getline(in, line)) throw Error("trace file is empty: missing header record");
    try {
        f.header = parse_header(json::parse(line));
        long n = 1;
        while (std::getline(in, line)) {
            ++n;
            if (line.empty()) continue;
            f.records.push_back(decode_record(line));
        }
    } catch (const json::exception& e) {
        throw Error(std::string("malformed trace: ") + e.what());
    }
    return f;
}

TraceFile read_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("trace file not found: " + path.string());
    return read_trace(in);
}

namespace {

std::string pct(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << 100.0 * v << '%';
    return os.str();
}

std::string num(double v, int digits = 4) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(digits) << v;
    return os.str();
}

// Shortest text that parses back to the same double.
std::string exact(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string vec_str(const Vector& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v(i));
    return s + ")";
}

void portfolio_lines(std::ostringstream& os, const Portfolio& p, const std::vector<std::string>& assets,
                     const std::string& indent) {
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        const std::string name = k < static_cast<Eigen::Index>(assets.size()) ? assets[static_cast<std::size_t>(k)]
                                                                              : "asset" + std::to_string(k);
        os << indent << std::left << std::setw(6) << name << ' ' << std::right << std::setw(8) << pct(p.assets(k)) << "  "
           << exact(p.assets(k)) << '\n';
    }
    os << indent << std::left << std::setw(6) << "cash" << ' ' << std::right << std::setw(8) << pct(p.cash) << "  "
       << exact(p.cash) << '\n';
}

}  // namespace

std::string render_record(const TraceRecord& r, const std::vector<std::string>& assets) {
    std::ostringstream os;
    os << "period " << r.period << "  " << r.date << (r.partial ? "  (partial windows)" : "") << '\n';

    os << "[1] signals\n"
       << "    xi " << num(r.regime.score) << " (" << to_string(r.regime.label) << ")"
       << (r.regime.attenuated ? ", attenuated" : "") << ", previous " << num(r.regime.previous_score) << '\n'
       << "    EW r30 " << num(r.r30) << ", sigma30 " << num(r.sigma30) << ", r7 " << num(r.r7) << '\n'
       << "    BTC minus alts " << num(r.btc_minus_alts) << ", on-chain diff "
       << (r.onchain_diff ? num(*r.onchain_diff) : std::string("n/a")) << ", drawdown " << pct(r.drawdown) << '\n';

    os << "[2] coalitions\n";
    for (std::size_t i = 0; i < r.coalitions.size(); ++i) {
        const auto& d = r.coalitions[i];
        os << "    {" << kCoalitionLabels[i] << "} vote " << to_string(d.vote) << ", cash " << pct(d.portfolio.cash)
           << "  " << d.rationale << '\n';
    }

    os << "[3] credit\n"
       << "    v(S) ";
    for (std::size_t i = 0; i < r.values.size(); ++i) os << kCoalitionLabels[i] << '=' << num(r.values[i]) << ' ';
    os << '\n'
       << "    phi " << vec_str(r.phi) << '\n'
       << "    omega " << vec_str(r.omega) << ", regime-adjusted " << vec_str(r.omega_tilde) << '\n'
       << "    pairwise " << vec_str(r.pairwise) << '\n'
       << "    WTA " << (r.wta ? "active on agent " + std::to_string(r.dominant + 1) : std::string("inactive")) << '\n';

    os << "[4] blend\n"
       << "    V_S1 " << num(r.v_s1) << ", V_S2 " << num(r.v_s2) << '\n'
       << "    beta_S1 " << num(r.beta_s1) << ", beta_gc " << num(r.beta_gc) << ", final " << num(r.beta_gc_final)
       << ", kappa " << num(r.kappa) << '\n';

    os << "[5] overlays\n";
    for (const auto& s : r.overlays.steps) {
        os << "    " << std::left << std::setw(18) << s.name << (s.active ? "active  " : "idle    ") << "cash "
           << pct(s.pre.cash) << " -> " << pct(s.post.cash);
        if (!s.note.empty()) os << "  (" << s.note << ")";
        os << '\n';
    }
    os << "    final portfolio\n";
    portfolio_lines(os, r.executed, assets, "      ");
    if (r.realized)
        os << "    realized " << pct(r.realized->net) << " net (gross " << pct(r.realized->gross) << ", cost "
           << num(r.realized->cost * 1e4, 3) << " bp), equity " << num(r.realized->equity) << '\n';
    else
        os << "    no next-day price: return not realized\n";
    return os.str();
}

}  // namespace mrc
