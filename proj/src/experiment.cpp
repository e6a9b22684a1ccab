#include "aoirelay/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace aoirelay {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class T>
T read_field(const Json& obj, const char* key, T fallback) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const Json::exception& e) {
        throw ConfigError(key, e.what());
    }
}

void reject_unknown(const Json& obj, std::initializer_list<const char*> known, const char* where) {
    if (!obj.is_object()) throw ConfigError(where, "must be a JSON object");
    for (const auto& item : obj.items()) {
        const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return item.key() == k; });
        if (!ok) throw ConfigError(item.key(), std::string("unknown key in ") + where);
    }
}

NetworkConfig parse_network(const Json& j) {
    reject_unknown(j,
                   {"n_eds", "activation_prob", "n_channels", "n_relays", "erasure_p1", "erasure_p2", "buffer_size",
                    "rts_max_delay", "rts_resolution", "horizon_slots", "warmup_slots", "seed"},
                   "network");
    NetworkConfig c;
    c.n_eds = read_field<std::size_t>(j, "n_eds", c.n_eds);
    c.activation_prob = read_field<double>(j, "activation_prob", c.activation_prob);
    c.n_channels = read_field<std::size_t>(j, "n_channels", c.n_channels);
    c.n_relays = read_field<std::size_t>(j, "n_relays", c.n_relays);
    c.erasure_p2 = read_field<double>(j, "erasure_p2", c.erasure_p2);
    c.buffer_size = read_field<std::size_t>(j, "buffer_size", c.buffer_size);
    c.rts_max_delay = read_field<double>(j, "rts_max_delay", c.rts_max_delay);
    if (auto it = j.find("rts_resolution"); it != j.end() && !it->is_null()) {
        if (it->is_string()) {
            if (it->get<std::string>() != "continuous") {
                throw ConfigError("rts_resolution", "must be a mini-slot count or \"continuous\"");
            }
        } else {
            c.rts_resolution = read_field<std::uint32_t>(j, "rts_resolution", 0);
        }
    }
    c.horizon_slots = read_field<std::uint64_t>(j, "horizon_slots", c.horizon_slots);
    c.warmup_slots = read_field<std::uint64_t>(j, "warmup_slots", c.warmup_slots);
    c.seed = read_field<std::uint64_t>(j, "seed", c.seed);
    if (auto it = j.find("erasure_p1"); it != j.end()) {
        if (it->is_number()) {
            c.erasure_p1 = {it->get<double>()};
        } else if (it->is_array()) {
            c.erasure_p1 = read_field<std::vector<double>>(j, "erasure_p1", {});
        } else if (it->is_object()) {
            reject_unknown(*it, {"uniform"}, "erasure_p1");
            const auto range = read_field<std::vector<double>>(*it, "uniform", {});
            if (range.size() != 2) throw ConfigError("erasure_p1", "uniform needs [lo, hi]");
            c.erasure_p1_range = UniformRange{range[0], range[1]};
        } else {
            throw ConfigError("erasure_p1", "must be a number, a list, or {\"uniform\": [lo, hi]}");
        }
    }
    return c;
}

Json network_json(const NetworkConfig& c) {
    Json j;
    j["n_eds"] = c.n_eds;
    j["activation_prob"] = c.activation_prob;
    j["n_channels"] = c.n_channels;
    j["n_relays"] = c.n_relays;
    if (c.erasure_p1_range) {
        j["erasure_p1"] = Json{{"uniform", {c.erasure_p1_range->lo, c.erasure_p1_range->hi}}};
    } else if (c.erasure_p1.size() == 1) {
        j["erasure_p1"] = c.erasure_p1.front();
    } else {
        j["erasure_p1"] = c.erasure_p1;
    }
    j["erasure_p2"] = c.erasure_p2;
    j["buffer_size"] = c.buffer_size;
    j["rts_max_delay"] = c.rts_max_delay;
    j["rts_resolution"] = c.rts_resolution ? Json(*c.rts_resolution) : Json(nullptr);
    j["horizon_slots"] = c.horizon_slots;
    j["warmup_slots"] = c.warmup_slots;
    j["seed"] = c.seed;
    return j;
}

SymbolBudget parse_budget(const Json& j) {
    reject_unknown(j, {"t_total", "t_pilot", "t_id", "t_relay_id", "t_rts", "buffer_size"}, "budget");
    SymbolBudget b;
    b.t_total = read_field<std::uint64_t>(j, "t_total", b.t_total);
    b.t_pilot = read_field<std::uint64_t>(j, "t_pilot", b.t_pilot);
    b.t_id = read_field<std::uint64_t>(j, "t_id", b.t_id);
    b.t_relay_id = read_field<std::uint64_t>(j, "t_relay_id", b.t_relay_id);
    b.t_rts = read_field<std::uint64_t>(j, "t_rts", b.t_rts);
    b.buffer_size = read_field<std::size_t>(j, "buffer_size", b.buffer_size);
    return b;
}

Json budget_json(const SymbolBudget& b) {
    return Json{{"t_total", b.t_total}, {"t_pilot", b.t_pilot},       {"t_id", b.t_id},
                {"t_relay_id", b.t_relay_id}, {"t_rts", b.t_rts}, {"buffer_size", b.buffer_size}};
}

bool is_integral_axis(SweepAxis axis) {
    return axis == SweepAxis::kRelays || axis == SweepAxis::kChannels || axis == SweepAxis::kEds ||
           axis == SweepAxis::kResolution;
}

bool heterogeneous(const NetworkConfig& c) {
    if (c.erasure_p1_range) return true;
    return std::any_of(c.erasure_p1.begin(), c.erasure_p1.end(),
                       [&](double e) { return e != c.erasure_p1.front(); });
}

SymbolBudget budget_for(const ExperimentSpec& spec, const NetworkConfig& c) {
    if (spec.budget) return *spec.budget;
    return SymbolBudget::for_network(c.n_eds, c.n_relays, c.buffer_size);
}

void fill_bound(RunResult& r) {
    const NetworkConfig& c = r.config;
    r.ed_bound.assign(c.n_eds, kNaN);
    if (!heterogeneous(c)) {
        r.bound = analytics::aoi_bound({c.n_eds, c.activation_prob, c.n_channels, c.n_relays, r.erasure_p1.front()});
        std::fill(r.ed_bound.begin(), r.ed_bound.end(), r.bound.aaoi);
        return;
    }
    double q_sum = 0.0;
    double aaoi_sum = 0.0;
    for (std::size_t i = 0; i < c.n_eds; ++i) {
        const double q =
            analytics::success_prob_heterogeneous(i, r.erasure_p1, c.activation_prob, c.n_channels, c.n_relays);
        const double pq = c.activation_prob * q;
        r.ed_bound[i] = pq > 0.0 ? 1.0 / pq : std::numeric_limits<double>::infinity();
        q_sum += q;
        aaoi_sum += r.ed_bound[i];
    }
    const double n = static_cast<double>(c.n_eds);
    r.bound.q = q_sum / n;
    r.bound.aaoi = aaoi_sum / n;
    r.bound.paoi = r.bound.aaoi;
    r.bound.p_ratio = kNaN;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
    out << text;
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + path.string() + ": " + std::strerror(errno));
}

std::filesystem::path companion(const std::filesystem::path& path, const std::string& suffix) {
    std::filesystem::path out = path;
    out.replace_filename(path.stem().string() + suffix + ".csv");
    return out;
}

std::string header_comment(const ResultTable& table) {
    std::ostringstream os;
    os << "# aoirelay experiment " << table.spec.name << '\n';
    os << "# seed " << table.spec.base.seed << '\n';
    os << "# config " << describe(table.spec) << '\n';
    return os.str();
}

std::string join(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) line += ',';
        line += cells[i];
    }
    line += '\n';
    return line;
}

std::string resolution_cell(const NetworkConfig& c) {
    return c.rts_resolution ? std::to_string(*c.rts_resolution) : std::string("continuous");
}

std::string ccdf_column(double delta) { return "ccdf_" + format_number(delta); }

} // namespace

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::kNone: return "none";
    case SweepAxis::kRelays: return "K";
    case SweepAxis::kChannels: return "F";
    case SweepAxis::kActivation: return "p";
    case SweepAxis::kErasureP2: return "eps2";
    case SweepAxis::kEds: return "N";
    case SweepAxis::kResolution: return "R";
    }
    return "none";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    for (auto axis : {SweepAxis::kNone, SweepAxis::kRelays, SweepAxis::kChannels, SweepAxis::kActivation,
                      SweepAxis::kErasureP2, SweepAxis::kEds, SweepAxis::kResolution}) {
        if (to_string(axis) == name) return axis;
    }
    throw ConfigError("sweep.axis", "unknown axis '" + std::string(name) + "' (none, K, F, p, eps2, N, R)");
}

std::string format_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

void ExperimentSpec::validate() const {
    if (schedulers.empty()) throw ConfigError("schedulers", "needs at least one scheduler");
    if (replications < 1) throw ConfigError("replications", "must be at least 1");
    if (axis != SweepAxis::kNone && values.empty()) throw ConfigError("sweep.values", "needs at least one value");
    if (axis == SweepAxis::kNone && !values.empty()) throw ConfigError("sweep.values", "given without an axis");
    for (double v : values) {
        if (is_integral_axis(axis) && (v < 0.0 || v != std::floor(v))) {
            throw ConfigError("sweep.values", std::string(to_string(axis)) + " values must be whole numbers");
        }
    }
    if (optimize_activation && heterogeneous(base)) {
        throw ConfigError("optimize_activation", "needs a common erasure_p1");
    }
    for (std::size_t point = 0; point < n_points(); ++point) {
        const NetworkConfig c = point_config(*this, point, 0);
        for (auto kind : schedulers) c.validate_for(kind);
        budget_for(*this, c).validate(c.n_eds, c.n_relays);
    }
}

ExperimentSpec parse_experiment(std::string_view json_text) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("experiment", std::string("malformed JSON: ") + e.what());
    }
    reject_unknown(j,
                   {"name", "network", "schedulers", "sweep", "replications", "optimize_activation", "budget",
                    "ccdf_points", "ccdf_curves", "per_ed", "output"},
                   "experiment");
    ExperimentSpec s;
    s.name = read_field<std::string>(j, "name", s.name);
    if (auto it = j.find("network"); it != j.end()) s.base = parse_network(*it);
    if (auto it = j.find("schedulers"); it != j.end()) {
        s.schedulers.clear();
        for (const auto& name : read_field<std::vector<std::string>>(j, "schedulers", {})) {
            s.schedulers.push_back(parse_scheduler_kind(name));
        }
    }
    if (auto it = j.find("sweep"); it != j.end() && !it->is_null()) {
        reject_unknown(*it, {"axis", "values"}, "sweep");
        s.axis = parse_sweep_axis(read_field<std::string>(*it, "axis", "none"));
        s.values = read_field<std::vector<double>>(*it, "values", {});
    }
    s.replications = read_field<std::size_t>(j, "replications", s.replications);
    s.optimize_activation = read_field<bool>(j, "optimize_activation", s.optimize_activation);
    if (auto it = j.find("budget"); it != j.end() && !it->is_null()) s.budget = parse_budget(*it);
    s.ccdf_points = read_field<std::vector<double>>(j, "ccdf_points", s.ccdf_points);
    s.ccdf_curves = read_field<bool>(j, "ccdf_curves", s.ccdf_curves);
    s.per_ed = read_field<bool>(j, "per_ed", s.per_ed);
    s.output = read_field<std::string>(j, "output", "");
    s.validate();
    return s;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string() + ": " + std::strerror(errno));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_experiment(text.str());
}

std::string describe(const ExperimentSpec& s) {
    Json j;
    j["name"] = s.name;
    j["network"] = network_json(s.base);
    std::vector<std::string> names;
    for (auto k : s.schedulers) names.emplace_back(to_string(k));
    j["schedulers"] = names;
    j["sweep"] = Json{{"axis", std::string(to_string(s.axis))}, {"values", s.values}};
    j["replications"] = s.replications;
    j["optimize_activation"] = s.optimize_activation;
    j["budget"] = s.budget ? budget_json(*s.budget) : Json(nullptr);
    j["ccdf_points"] = s.ccdf_points;
    j["ccdf_curves"] = s.ccdf_curves;
    j["per_ed"] = s.per_ed;
    return j.dump();
}

NetworkConfig point_config(const ExperimentSpec& spec, std::size_t point, std::size_t replication) {
    NetworkConfig c = spec.base;
    c.seed = spec.base.seed + replication;
    if (spec.axis != SweepAxis::kNone) {
        const double v = spec.values.at(point);
        switch (spec.axis) {
        case SweepAxis::kRelays: c.n_relays = static_cast<std::size_t>(v); break;
        case SweepAxis::kChannels: c.n_channels = static_cast<std::size_t>(v); break;
        case SweepAxis::kActivation: c.activation_prob = v; break;
        case SweepAxis::kErasureP2: c.erasure_p2 = v; break;
        case SweepAxis::kEds: c.n_eds = static_cast<std::size_t>(v); break;
        case SweepAxis::kResolution:
            if (v == 0.0) {
                c.rts_resolution.reset();
            } else {
                c.rts_resolution = static_cast<std::uint32_t>(v);
            }
            break;
        case SweepAxis::kNone: break;
        }
    }
    if (spec.optimize_activation) {
        c.activation_prob =
            analytics::optimize_activation(c.n_eds, c.n_channels, c.n_relays, c.erasure_p1.front()).p_star;
    }
    return c;
}

double ks_distance(const MetricsAccumulator& metrics, double p, double q) {
    const auto& hist = metrics.total_histogram();
    if (metrics.slots() == 0) return kNaN;
    const std::size_t n = metrics.n_eds();
    const auto analytic = analytics::network_aoi_ccdf_table(n, p, q, n + hist.size());
    // Both sides are Pr{sum of ages > S} at S = N + bin.
    double emp_above = static_cast<double>(metrics.slots());
    double worst = 0.0;
    const double total = static_cast<double>(metrics.slots());
    for (std::size_t bin = 0; bin <= hist.size(); ++bin) {
        if (bin < hist.size()) emp_above -= static_cast<double>(hist[bin]);
        const double emp = std::max(emp_above, 0.0) / total;
        worst = std::max(worst, std::abs(emp - analytic[bin]));
    }
    return worst;
}

ResultTable run_experiment(const ExperimentSpec& spec, std::size_t jobs, const ProgressFn& progress) {
    spec.validate();
    ResultTable table{spec, {}};

    // Resolve every point once; the activation search is not free.
    std::vector<NetworkConfig> point_base;
    for (std::size_t point = 0; point < spec.n_points(); ++point) point_base.push_back(point_config(spec, point, 0));

    for (std::size_t point = 0; point < spec.n_points(); ++point) {
        for (auto kind : spec.schedulers) {
            for (std::size_t rep = 0; rep < spec.replications; ++rep) {
                RunResult r;
                r.point = point;
                r.axis_value = spec.axis == SweepAxis::kNone ? 0.0 : spec.values[point];
                r.scheduler = kind;
                r.replication = rep;
                r.config = point_base[point];
                r.config.seed = spec.base.seed + rep;
                table.rows.push_back(std::move(r));
            }
        }
    }

    const std::size_t total = table.rows.size();
    std::atomic<std::size_t> next{0};
    std::size_t finished = 0;
    std::mutex mutex;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= total) return;
            {
                std::lock_guard lock(mutex);
                if (failure) return;
            }
            try {
                RunResult& r = table.rows[i];
                const auto start = std::chrono::steady_clock::now();
                const SymbolBudget budget = budget_for(spec, r.config);
                Simulator sim(r.config, r.scheduler, budget);
                sim.run();
                r.erasure_p1.assign(sim.erasure_p1().begin(), sim.erasure_p1().end());
                r.metrics = sim.metrics();
                r.counters = sim.counters();
                r.overhead_per_slot = overhead_symbols(r.scheduler, budget, r.config.n_relays);
                fill_bound(r);
                r.ks_distance = heterogeneous(r.config)
                                    ? kNaN
                                    : ks_distance(r.metrics, r.config.activation_prob, r.bound.q);
                r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
                std::lock_guard lock(mutex);
                ++finished;
                if (progress) progress(r, finished, total);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, std::max<std::size_t>(total, 1));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return table;
}

MetricsAccumulator pooled_metrics(const ResultTable& table, std::size_t point, SchedulerKind scheduler) {
    std::optional<MetricsAccumulator> pooled;
    for (const auto& r : table.rows) {
        if (r.point != point || r.scheduler != scheduler) continue;
        if (pooled) {
            pooled->merge(r.metrics);
        } else {
            pooled = r.metrics;
        }
    }
    if (!pooled) throw std::out_of_range("no results for that point and scheduler");
    return *pooled;
}

std::vector<std::string> preset_names() {
    return {"f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "hetnet"};
}

ExperimentSpec figure_preset(std::string_view name) {
    using enum SchedulerKind;
    const std::vector<SchedulerKind> exchange{kMam, kImas, kBufferedImas, kAbdr, kBufferedAbdr, kOracle};
    ExperimentSpec s;
    s.name = std::string(name);
    if (name == "f3") {
        s.schedulers = {kAlohaForward, kImas, kOracle};
        s.axis = SweepAxis::kChannels;
        s.values = {1, 2, 3, 4, 5};
    } else if (name == "f4") {
        s.schedulers = exchange;
        s.axis = SweepAxis::kRelays;
        s.values = {2, 3, 4, 5};
    } else if (name == "f5") {
        s.schedulers = exchange;
        s.axis = SweepAxis::kActivation;
        s.values = {0.06, 0.07, 0.08, 0.09, 0.10, 0.11, 0.12, 0.13};
    } else if (name == "f6") {
        s.schedulers = exchange;
        s.axis = SweepAxis::kChannels;
        s.values = {1, 2, 3, 4, 5};
        s.optimize_activation = true;
    } else if (name == "f7") {
        s.schedulers = {kImas, kAbdr, kBufferedAbdr, kOracle};
        s.axis = SweepAxis::kErasureP2;
        s.values = {0.1, 0.5};
        s.ccdf_curves = true;
    } else if (name == "f8") {
        s.schedulers = {kImas, kAbdr, kBufferedImas, kBufferedAbdr, kOracle};
        s.axis = SweepAxis::kErasureP2;
        s.values = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    } else if (name == "f9") {
        s.schedulers = {kImas, kAbdr, kBufferedAbdr, kOracle};
        s.axis = SweepAxis::kEds;
        s.values = {30, 60, 100, 150, 200, 250, 300};
        s.optimize_activation = true;
    } else if (name == "f10") {
        s.schedulers = {kAbdr, kBufferedAbdr};
        s.axis = SweepAxis::kResolution;
        s.values = {1, 2, 4, 8, 16, 32, 64, 0};
    } else if (name == "hetnet") {
        s.schedulers = {kImas, kAbdr, kBufferedAbdr, kOracle};
        s.base.erasure_p1_range = UniformRange{0.05, 0.5};
        s.base.horizon_slots = 100'000;
        s.replications = 100;
        s.per_ed = true;
    } else {
        throw ConfigError("preset", "unknown preset '" + std::string(name) + "' (f3..f10, hetnet)");
    }
    return s;
}

std::string format_csv(const ResultTable& table) {
    std::string out = header_comment(table);
    std::vector<std::string> columns{
        "point",          "axis",          "axis_value",   "scheduler",     "replication",   "seed",
        "n_eds",          "activation_prob", "n_channels", "n_relays",      "erasure_p2",    "buffer_size",
        "rts_resolution", "measured_slots", "aaoi",        "aaoi_se",       "paoi",          "paoi_se",
        "bound_q",        "bound_aaoi",    "bound_paoi",   "aaoi_gap",      "deliveries",    "ap_collisions",
        "erased_tx",      "rts_ties",      "rts_collisions", "approximate_slots", "max_buffer_occupancy",
        "overhead_per_slot", "overhead_total", "ks_distance"};
    for (double d : table.spec.ccdf_points) columns.push_back(ccdf_column(d));
    out += join(columns);
    const std::string axis(to_string(table.spec.axis));
    for (const auto& r : table.rows) {
        const auto& c = r.config;
        const auto& m = r.metrics;
        std::vector<std::string> cells{std::to_string(r.point),
                                       axis,
                                       format_number(r.axis_value),
                                       std::string(to_string(r.scheduler)),
                                       std::to_string(r.replication),
                                       std::to_string(c.seed),
                                       std::to_string(c.n_eds),
                                       format_number(c.activation_prob),
                                       std::to_string(c.n_channels),
                                       std::to_string(c.n_relays),
                                       format_number(c.erasure_p2),
                                       std::to_string(c.buffer_size),
                                       resolution_cell(c),
                                       std::to_string(m.slots()),
                                       format_number(m.aaoi()),
                                       format_number(m.aaoi_stderr()),
                                       format_number(m.paoi()),
                                       format_number(m.paoi_stderr()),
                                       format_number(r.bound.q),
                                       format_number(r.bound.aaoi),
                                       format_number(r.bound.paoi),
                                       format_number(m.aaoi() - r.bound.aaoi),
                                       std::to_string(r.counters.deliveries),
                                       std::to_string(r.counters.ap_collisions),
                                       std::to_string(r.counters.erased_tx),
                                       std::to_string(r.counters.rts_ties),
                                       std::to_string(r.counters.rts_collisions),
                                       std::to_string(r.counters.approximate_slots),
                                       std::to_string(r.counters.max_buffer_occupancy),
                                       std::to_string(r.overhead_per_slot),
                                       std::to_string(r.counters.overhead_symbols),
                                       format_number(r.ks_distance)};
        for (double d : table.spec.ccdf_points) cells.push_back(format_number(m.empirical_ccdf(d)));
        out += join(cells);
    }
    return out;
}

std::string format_ccdf_csv(const ResultTable& table) {
    std::string out = header_comment(table);
    out += join({"point", "axis_value", "scheduler", "delta", "empirical", "analytic"});
    for (std::size_t point = 0; point < table.spec.n_points(); ++point) {
        for (auto kind : table.spec.schedulers) {
            const MetricsAccumulator m = pooled_metrics(table, point, kind);
            const RunResult* ref = nullptr;
            for (const auto& r : table.rows) {
                if (r.point == point && r.scheduler == kind) {
                    ref = &r;
                    break;
                }
            }
            const double p = ref->config.activation_prob;
            const std::size_t n = ref->config.n_eds;
            const bool het = heterogeneous(ref->config);
            for (int step = 2;; ++step) {
                const double delta = 0.5 * step;
                const double emp = m.empirical_ccdf(delta);
                const double ana = het ? kNaN : analytics::network_aoi_ccdf(delta, n, p, ref->bound.q).value;
                out += join({std::to_string(point), format_number(ref->axis_value), std::string(to_string(kind)),
                             format_number(delta), format_number(emp), format_number(ana)});
                if (emp < 1e-4 && (het || ana < 1e-4)) break;
            }
        }
    }
    return out;
}

std::string format_per_ed_csv(const ResultTable& table) {
    std::string out = header_comment(table);
    out += join({"point", "scheduler", "replication", "ed", "erasure_p1", "aaoi", "paoi", "bound_aaoi"});
    for (const auto& r : table.rows) {
        for (std::size_t ed = 0; ed < r.config.n_eds; ++ed) {
            out += join({std::to_string(r.point), std::string(to_string(r.scheduler)), std::to_string(r.replication),
                         std::to_string(ed), format_number(r.erasure_p1[ed]), format_number(r.metrics.ed_aaoi(ed)),
                         format_number(r.metrics.ed_paoi(ed)), format_number(r.ed_bound[ed])});
        }
    }
    return out;
}

std::vector<Regression> per_ed_regressions(const ResultTable& table) {
    std::vector<Regression> out;
    for (auto kind : table.spec.schedulers) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
        std::size_t n = 0;
        for (const auto& r : table.rows) {
            if (r.scheduler != kind) continue;
            for (std::size_t ed = 0; ed < r.config.n_eds; ++ed) {
                const double x = r.erasure_p1[ed];
                const double y = r.metrics.ed_aaoi(ed);
                sx += x;
                sy += y;
                sxx += x * x;
                sxy += x * y;
                syy += y * y;
                ++n;
            }
        }
        Regression reg;
        reg.scheduler = kind;
        reg.samples = n;
        const double dn = static_cast<double>(n);
        const double vx = sxx - sx * sx / dn;
        const double vy = syy - sy * sy / dn;
        const double cxy = sxy - sx * sy / dn;
        if (n >= 2 && vx > 0.0) {
            reg.slope = cxy / vx;
            reg.intercept = (sy - reg.slope * sx) / dn;
            reg.r_squared = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
        } else {
            reg.slope = reg.intercept = reg.r_squared = kNaN;
        }
        out.push_back(reg);
    }
    return out;
}

std::string format_regression_csv(const ResultTable& table) {
    std::string out = header_comment(table);
    out += join({"scheduler", "slope", "intercept", "r_squared", "samples"});
    for (const auto& reg : per_ed_regressions(table)) {
        out += join({std::string(to_string(reg.scheduler)), format_number(reg.slope), format_number(reg.intercept),
                     format_number(reg.r_squared), std::to_string(reg.samples)});
    }
    return out;
}

void emit_csv(const ResultTable& table, const std::filesystem::path& path) { write_file(path, format_csv(table)); }

std::vector<std::filesystem::path> write_outputs(const ResultTable& table, const std::filesystem::path& path) {
    std::vector<std::filesystem::path> written{path};
    emit_csv(table, path);
    if (table.spec.ccdf_curves) {
        written.push_back(companion(path, "_ccdf"));
        write_file(written.back(), format_ccdf_csv(table));
    }
    if (table.spec.per_ed) {
        written.push_back(companion(path, "_per_ed"));
        write_file(written.back(), format_per_ed_csv(table));
        written.push_back(companion(path, "_regression"));
        write_file(written.back(), format_regression_csv(table));
    }
    return written;
}

} // namespace aoirelay
