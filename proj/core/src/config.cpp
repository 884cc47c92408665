#include "relo/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "relo/csv.hpp"

namespace relo::cfg {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

Toml Toml::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

Toml Toml::parse(const std::string& text) {
    Toml t;
    std::istringstream in(text);
    std::string line, table;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments outside quotes
        std::string clean;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            if (c == '#' && !quoted) break;
            clean.push_back(c);
        }
        clean = trim(clean);
        if (clean.empty()) continue;
        if (clean.front() == '[') {
            if (clean.back() != ']')
                throw std::runtime_error("config: bad table header at line " +
                                         std::to_string(lineno));
            table = trim(clean.substr(1, clean.size() - 2));
            continue;
        }
        const size_t eq = clean.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected key = value at line " +
                                     std::to_string(lineno));
        const std::string key = trim(clean.substr(0, eq));
        std::string value = trim(clean.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
            value = value.substr(1, value.size() - 2);
        t.values_[table + "." + key] = value;
    }
    return t;
}

bool Toml::has(const std::string& table, const std::string& key) const {
    return values_.count(table + "." + key) > 0;
}

std::string Toml::get_string(const std::string& table, const std::string& key,
                             const std::string& fallback) const {
    const auto it = values_.find(table + "." + key);
    return it == values_.end() ? fallback : it->second;
}

double Toml::get_number(const std::string& table, const std::string& key, double fallback) const {
    const auto it = values_.find(table + "." + key);
    if (it == values_.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw std::runtime_error("config: " + table + "." + key + " is not a number");
    }
}

bool Toml::get_bool(const std::string& table, const std::string& key, bool fallback) const {
    const auto it = values_.find(table + "." + key);
    if (it == values_.end()) return fallback;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw std::runtime_error("config: " + table + "." + key + " is not a boolean");
}

namespace {

harness::PolicySpec policy_from_toml(const Toml& t) {
    harness::PolicySpec spec;
    const std::string kind = t.get_string("policy", "kind", "ranking");
    if (kind == "none" || kind == "noopt")
        spec.kind = harness::PolicyKind::none;
    else if (kind == "ranking")
        spec.kind = harness::PolicyKind::ranking;
    else if (kind == "local-mip" || kind == "mip")
        spec.kind = harness::PolicyKind::local_mip;
    else
        throw std::runtime_error("config: unknown policy.kind '" + kind + "'");

    spec.params.w_tt = t.get_number("policy", "w_tt", spec.params.w_tt);
    spec.params.w_d = t.get_number("policy", "w_d", spec.params.w_d);
    spec.params.r_th = t.get_number("policy", "r_th", spec.params.r_th);
    spec.params.h = static_cast<int>(t.get_number("policy", "h", spec.params.h));
    spec.params.paper_literal_update =
        t.get_bool("policy", "paper_literal_update", spec.params.paper_literal_update);
    spec.params.scooter_factor =
        t.get_number("policy", "scooter_factor", spec.params.scooter_factor);

    const std::string tie = t.get_string("policy", "tie_break", "lowest");
    if (tie != "lowest")
        throw std::runtime_error("config: only tie_break = \"lowest\" is supported");

    const std::string predictor = t.get_string("policy", "predictor", "last");
    if (predictor == "last") {
        spec.availability.kind = pred::AvailabilityKind::last;
    } else if (predictor.rfind("ma", 0) == 0) {
        spec.availability.kind = pred::AvailabilityKind::moving_average;
        spec.availability.window = std::stoi(predictor.substr(2));
    } else if (predictor == "linear-l1" || predictor == "lasso") {
        spec.availability.kind = pred::AvailabilityKind::linear_l1;
    } else if (predictor == "linear-l2" || predictor == "ridge") {
        spec.availability.kind = pred::AvailabilityKind::linear_l2;
    } else {
        throw std::runtime_error("config: unknown policy.predictor '" + predictor + "'");
    }
    if (spec.availability.kind == pred::AvailabilityKind::linear_l1 ||
        spec.availability.kind == pred::AvailabilityKind::linear_l2)
        spec.availability.window = static_cast<int>(t.get_number("policy", "window", 672));
    spec.availability.horizon = spec.params.h;
    spec.availability.strength = t.get_number("policy", "strength", 1.0);

    const std::string dm = t.get_string("policy", "demand_predictor", "lambda");
    if (dm == "lambda")
        spec.demand_mode = pred::DemandMode::lambda_baseline;
    else if (dm == "kde")
        spec.demand_mode = pred::DemandMode::kde;
    else
        throw std::runtime_error("config: unknown policy.demand_predictor '" + dm + "'");
    spec.kde_bandwidth = t.get_number("policy", "kde_bandwidth", 4.0);
    spec.mip_budget_ms = t.get_number("policy", "mip_budget_ms", 50.0);
    return spec;
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    const Toml t = Toml::parse_file(path);
    RunConfig rc;
    const auto dir = path.parent_path();
    auto resolve = [&](const std::string& raw) -> std::filesystem::path {
        if (raw.empty()) return {};
        std::filesystem::path p(raw);
        return p.is_absolute() ? p : dir / p;
    };
    rc.trips = resolve(t.get_string("data", "trips", ""));
    rc.activity = resolve(t.get_string("data", "activity", ""));
    rc.travel = resolve(t.get_string("data", "travel", ""));
    rc.presence = resolve(t.get_string("data", "presence", ""));
    rc.avail_history = resolve(t.get_string("data", "avail_history", ""));
    rc.events = resolve(t.get_string("data", "events", ""));
    rc.zones = static_cast<int>(t.get_number("data", "zones", rc.zones));
    rc.slots = static_cast<int>(t.get_number("data", "slots", rc.slots));

    rc.horizon = static_cast<int>(t.get_number("model", "horizon", rc.slots));
    rc.fleet = static_cast<long>(t.get_number("model", "fleet", rc.fleet));
    rc.staff = static_cast<long>(t.get_number("model", "staff", rc.staff));
    rc.delta = t.get_number("model", "delta", rc.delta);
    rc.mean_speed_kmh = t.get_number("model", "mean_speed_kmh", rc.mean_speed_kmh);

    rc.policy = policy_from_toml(t);

    rc.scenarios = static_cast<int>(t.get_number("run", "scenarios", rc.scenarios));
    rc.seed = static_cast<uint64_t>(t.get_number("run", "seed", 1));
    rc.threads = static_cast<int>(t.get_number("run", "threads", 0));
    rc.out = resolve(t.get_string("run", "out", "out"));

    if (rc.zones < 2) throw std::runtime_error("config: data.zones must be >= 2");
    if (rc.horizon < 1 || rc.horizon > rc.slots)
        throw std::runtime_error("config: model.horizon must be in [1, slots]");
    return rc;
}

harness::Instance load_instance(const RunConfig& rc) {
    const std::pair<const char*, std::filesystem::path> required[] = {
        {"trips", rc.trips}, {"activity", rc.activity}, {"travel", rc.travel}};
    for (const auto& [name, p] : required) {
        if (p.empty()) throw std::runtime_error(std::string("data: missing data.") + name);
        if (!std::filesystem::exists(p))
            throw std::runtime_error("data: file not found: " + p.string());
    }
    const int N = rc.zones, P = rc.slots;

    const MaskedTensor3 trips_raw = csv::read_tensor(rc.trips, N, N, P);
    const Matrix activity = csv::read_matrix_long(rc.activity, N, P);
    const MaskedTensor3 travel_raw = csv::read_tensor(rc.travel, N, N, P);

    synth::ZoneDataset ds;
    ds.trips = trips_raw.values;  // absent trip entries are zero demand
    ds.activity = activity;
    ds.travel.values =
        demand::impute_travel_times(travel_raw, nullptr, rc.mean_speed_kmh * 1000.0 / 60.0);
    ds.travel.horizon = P;

    if (!rc.presence.empty() && std::filesystem::exists(rc.presence)) {
        ds.presence_weights.assign(N, 0.0);
        for (const auto& row : csv::read_rows(rc.presence))
            ds.presence_weights.at(std::stoul(row[0])) = std::stod(row[1]);
    } else {
        ds.presence_weights.assign(N, 1.0);
    }
    if (!rc.avail_history.empty() && std::filesystem::exists(rc.avail_history)) {
        // long format i,t,value; length inferred from the max t
        int max_t = 0;
        const auto rows = csv::read_rows(rc.avail_history);
        for (const auto& r : rows) max_t = std::max(max_t, std::stoi(r[1]));
        ds.avail_history = Matrix(N, max_t, 0.0);
        for (const auto& r : rows)
            ds.avail_history.at(std::stoi(r[0]), std::stoi(r[1]) - 1) = std::stod(r[2]);
    } else {
        ds.avail_history = Matrix(N, 2 * P, static_cast<double>(rc.fleet) / N);
    }
    if (!rc.events.empty() && std::filesystem::exists(rc.events)) {
        ds.events = pred::read_events_csv(rc.events.string(), N, P);
        for (auto& ev : ds.events)
            if (ev.empty()) ev.push_back(P / 2.0);
    } else {
        ds.events.assign(N, {P / 2.0});
    }

    harness::Instance inst = harness::make_instance(ds, rc.fleet, rc.staff, rc.delta);
    inst.horizon = rc.horizon;
    return inst;
}

}  // namespace relo::cfg
