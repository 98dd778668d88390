#include "aerocf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include "aerocf/baselines.hpp"
#include "aerocf/error.hpp"
#include "aerocf/random.hpp"
#include "json.hpp"

namespace aerocf {

using nlohmann::json;

std::string_view to_string(Scheme s) {
    switch (s) {
        case Scheme::aerial_cellfree: return "aerial_cellfree";
        case Scheme::aerial_cellular: return "aerial_cellular";
        case Scheme::terrestrial_cellfree: return "terrestrial_cellfree";
    }
    return "aerial_cellfree";
}

Scheme scheme_from_string(std::string_view name) {
    if (name == "aerial_cellfree") return Scheme::aerial_cellfree;
    if (name == "aerial_cellular") return Scheme::aerial_cellular;
    if (name == "terrestrial_cellfree") return Scheme::terrestrial_cellfree;
    throw ConfigError("scheme", "unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(SweepParam p) {
    switch (p) {
        case SweepParam::none: return "none";
        case SweepParam::p_m_dbm: return "P_m_dbm";
        case SweepParam::M: return "M";
        case SweepParam::K: return "K";
        case SweepParam::S: return "S";
        case SweepParam::environment: return "environment";
    }
    return "none";
}

SweepParam sweep_param_from_string(std::string_view name) {
    if (name == "none" || name.empty()) return SweepParam::none;
    if (name == "P_m_dbm") return SweepParam::p_m_dbm;
    if (name == "M") return SweepParam::M;
    if (name == "K") return SweepParam::K;
    if (name == "S") return SweepParam::S;
    if (name == "environment") return SweepParam::environment;
    throw ConfigError("sweep.param", "unknown parameter '" + std::string(name) + "'");
}

namespace {

int parse_count(std::string_view field, std::string_view v) {
    std::size_t pos = 0;
    int n = 0;
    try {
        n = std::stoi(std::string(v), &pos);
    } catch (const std::exception&) {
        throw ConfigError(std::string(field), "not an integer: '" + std::string(v) + "'");
    }
    if (pos != v.size()) throw ConfigError(std::string(field), "not an integer: '" + std::string(v) + "'");
    if (n < 1) throw ConfigError(std::string(field), "must be >= 1");
    return n;
}

double parse_real(std::string_view field, std::string_view v) {
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(std::string(v), &pos);
    } catch (const std::exception&) {
        throw ConfigError(std::string(field), "not a number: '" + std::string(v) + "'");
    }
    if (pos != v.size() || !std::isfinite(x))
        throw ConfigError(std::string(field), "not a number: '" + std::string(v) + "'");
    return x;
}

void check_keys(const json& j, std::string_view where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(where), "must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) throw ConfigError(std::string(where) + "." + it.key(), "unknown field");
    }
}

template <class T>
void read(const json& j, const char* key, T& out, std::string_view where) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string(where) + "." + key, "wrong type");
    }
}

UpaShape read_upa(const json& v, const std::string& field) {
    if (v.is_number_integer()) {
        const int n = v.get<int>();
        if (n < 1) throw ConfigError(field, "must be >= 1");
        return UpaShape::near_square(n);
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer())
        return {v[0].get<int>(), v[1].get<int>()};
    throw ConfigError(field, "expected an element count or [width, length]");
}

std::string value_label(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return v.dump();
    throw ConfigError("sweep.values", "entries must be numbers or names");
}

json label_json(SweepParam p, const std::string& v) {
    if (p == SweepParam::environment) return v;
    return json::parse(v);
}

double median_of(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os << std::setprecision(10) << x;
    return os.str();
}

}  // namespace

void ExperimentConfig::validate() const {
    scenario.validate();
    if (drops < 1) throw ConfigError("drops", "must be >= 1");
    if (schemes.empty()) throw ConfigError("schemes", "at least one scheme required");
    if (max_outer < 1) throw ConfigError("bcd.max_outer", "must be >= 1");
    if (!(bcd_tol >= 0.0)) throw ConfigError("bcd.tol", "must be >= 0");
    if (!(eta_max > 0.0)) throw ConfigError("bisection.eta_max", "must be > 0");
    if (!(epsilon > 0.0)) throw ConfigError("bisection.epsilon", "must be > 0");
    if (workers < 1) throw ConfigError("workers", "must be >= 1");
    if (mc.enabled && mc.trials < 1000) throw ConfigError("mc.trials", "need at least 1000 trials");
    if (sweep.param != SweepParam::none && sweep.values.empty())
        throw ConfigError("sweep.values", "empty value list");
    for (const auto& v : sweep_labels(*this)) apply_sweep(*this, v).validate();
}

std::string ExperimentConfig::to_json() const {
    const auto& sc = scenario;
    json s = {{"K", sc.num_users},
              {"M", sc.num_uxnbs},
              {"area", {sc.area.x_min, sc.area.x_max, sc.area.y_min, sc.area.y_max}},
              {"uxnb_height_m", sc.uxnb_height_m},
              {"haps_altitude_m", sc.haps_altitude_m},
              {"terrestrial_ap_height_m", sc.terrestrial_ap_height_m},
              {"f_sub6_hz", sc.radio.f_sub6_hz},
              {"f_thz_hz", sc.radio.f_thz_hz},
              {"bandwidth_hz", sc.radio.bandwidth_hz},
              {"noise_psd_dbm_hz", sc.radio.noise_psd_dbm_hz},
              {"N", {sc.radio.uxnb_rx.width, sc.radio.uxnb_rx.length}},
              {"G", {sc.radio.uxnb_tx.width, sc.radio.uxnb_tx.length}},
              {"S", {sc.radio.haps_rx.width, sc.radio.haps_rx.length}},
              {"absorption_db_per_km", sc.absorption_db_per_km},
              {"effective_height_m", sc.effective_height_m},
              {"user_power_w", sc.user_power_w},
              {"uxnb_power_dbm", sc.uxnb_power_dbm}};
    if (sc.env.kind == EnvironmentKind::custom)
        s["environment"] = {{"A", sc.env.a}, {"B", sc.env.b}, {"eta_los_db", sc.env.eta_los_db},
                            {"eta_nlos_db", sc.env.eta_nlos_db}};
    else
        s["environment"] = std::string(aerocf::to_string(sc.env.kind));

    json j;
    j["schema_version"] = kSchemaVersion;
    j["scenario"] = s;
    j["schemes"] = json::array();
    for (auto x : schemes) j["schemes"].push_back(std::string(aerocf::to_string(x)));
    j["optimize"] = std::string(aerocf::to_string(optimize));
    json vals = json::array();
    for (const auto& v : sweep.values) vals.push_back(label_json(sweep.param, v));
    j["sweep"] = {{"param", std::string(aerocf::to_string(sweep.param))}, {"values", vals}};
    j["drops"] = drops;
    j["seed"] = seed;
    j["mc"] = {{"enabled", mc.enabled},
               {"trials", mc.trials},
               {"batches", mc.batches},
               {"force_los", mc.force_los},
               {"unit_transmittance", mc.unit_transmittance},
               {"symbols", mc.symbols == SymbolModel::gaussian ? "gaussian" : "unit_modulus"}};
    j["bcd"] = {{"max_outer", max_outer}, {"tol", bcd_tol}};
    j["bisection"] = {{"eta_max", eta_max}, {"epsilon", epsilon}};
    j["workers"] = workers;
    j["timing"] = timing;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    check_keys(j, "config", {"schema_version", "scenario", "schemes", "optimize", "sweep", "drops", "seed", "mc",
                             "bcd", "bisection", "workers", "timing"});
    if (!j.contains("schema_version") || j["schema_version"] != kSchemaVersion)
        throw ConfigError("schema_version", "expected " + std::to_string(kSchemaVersion));

    ExperimentConfig c;
    if (j.contains("scenario")) {
        const json& s = j["scenario"];
        check_keys(s, "scenario",
                   {"K", "M", "area", "uxnb_height_m", "haps_altitude_m", "terrestrial_ap_height_m", "f_sub6_hz",
                    "f_thz_hz", "bandwidth_hz", "noise_psd_dbm_hz", "N", "G", "S", "environment",
                    "absorption_db_per_km", "effective_height_m", "user_power_w", "uxnb_power_dbm"});
        auto& sc = c.scenario;
        read(s, "K", sc.num_users, "scenario");
        read(s, "M", sc.num_uxnbs, "scenario");
        if (s.contains("area")) {
            const auto& a = s["area"];
            if (!a.is_array() || a.size() != 4) throw ConfigError("scenario.area", "expected [x_min, x_max, y_min, y_max]");
            sc.area = {a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>()};
        }
        read(s, "uxnb_height_m", sc.uxnb_height_m, "scenario");
        read(s, "haps_altitude_m", sc.haps_altitude_m, "scenario");
        read(s, "terrestrial_ap_height_m", sc.terrestrial_ap_height_m, "scenario");
        read(s, "f_sub6_hz", sc.radio.f_sub6_hz, "scenario");
        read(s, "f_thz_hz", sc.radio.f_thz_hz, "scenario");
        read(s, "bandwidth_hz", sc.radio.bandwidth_hz, "scenario");
        read(s, "noise_psd_dbm_hz", sc.radio.noise_psd_dbm_hz, "scenario");
        if (!(sc.radio.bandwidth_hz > 0.0)) throw ConfigError("scenario.bandwidth_hz", "must be > 0");
        sc.radio.sigma2_uxnb_w = noise_power_w(sc.radio.noise_psd_dbm_hz, sc.radio.bandwidth_hz);
        sc.radio.sigma2_haps_w = sc.radio.sigma2_uxnb_w;
        if (s.contains("N")) sc.radio.uxnb_rx = read_upa(s["N"], "scenario.N");
        if (s.contains("G")) sc.radio.uxnb_tx = read_upa(s["G"], "scenario.G");
        if (s.contains("S")) sc.radio.haps_rx = read_upa(s["S"], "scenario.S");
        if (s.contains("environment")) {
            const auto& e = s["environment"];
            if (e.is_string()) {
                sc.env = Environment::preset(environment_kind_from_string(e.get<std::string>()));
            } else {
                check_keys(e, "scenario.environment", {"A", "B", "eta_los_db", "eta_nlos_db"});
                sc.env.kind = EnvironmentKind::custom;
                read(e, "A", sc.env.a, "scenario.environment");
                read(e, "B", sc.env.b, "scenario.environment");
                read(e, "eta_los_db", sc.env.eta_los_db, "scenario.environment");
                read(e, "eta_nlos_db", sc.env.eta_nlos_db, "scenario.environment");
            }
        }
        read(s, "absorption_db_per_km", sc.absorption_db_per_km, "scenario");
        read(s, "effective_height_m", sc.effective_height_m, "scenario");
        read(s, "user_power_w", sc.user_power_w, "scenario");
        read(s, "uxnb_power_dbm", sc.uxnb_power_dbm, "scenario");
    }
    if (j.contains("schemes")) {
        const auto& a = j["schemes"];
        if (!a.is_array()) throw ConfigError("schemes", "must be an array of names");
        c.schemes.clear();
        for (const auto& x : a) c.schemes.push_back(scheme_from_string(x.get<std::string>()));
    }
    if (j.contains("optimize")) c.optimize = optimize_mode_from_string(j["optimize"].get<std::string>());
    if (j.contains("sweep")) {
        const auto& sw = j["sweep"];
        check_keys(sw, "sweep", {"param", "values"});
        if (sw.contains("param")) c.sweep.param = sweep_param_from_string(sw["param"].get<std::string>());
        if (sw.contains("values")) {
            if (!sw["values"].is_array()) throw ConfigError("sweep.values", "must be an array");
            for (const auto& v : sw["values"]) c.sweep.values.push_back(value_label(v));
        }
    }
    if (j.contains("drops")) {
        const auto& d = j["drops"];
        if (!d.is_number_integer() || d.get<long long>() < 1) throw ConfigError("drops", "must be an integer >= 1");
        c.drops = d.get<std::size_t>();
    }
    read(j, "seed", c.seed, "config");
    if (j.contains("mc")) {
        const auto& m = j["mc"];
        check_keys(m, "mc", {"enabled", "trials", "batches", "force_los", "unit_transmittance", "symbols"});
        read(m, "enabled", c.mc.enabled, "mc");
        if (m.contains("trials")) {
            if (!m["trials"].is_number_integer() || m["trials"].get<long long>() < 0)
                throw ConfigError("mc.trials", "must be a non-negative integer");
            c.mc.trials = m["trials"].get<std::size_t>();
        }
        read(m, "batches", c.mc.batches, "mc");
        read(m, "force_los", c.mc.force_los, "mc");
        read(m, "unit_transmittance", c.mc.unit_transmittance, "mc");
        if (m.contains("symbols")) {
            const auto v = m["symbols"].get<std::string>();
            if (v == "gaussian") c.mc.symbols = SymbolModel::gaussian;
            else if (v == "unit_modulus") c.mc.symbols = SymbolModel::unit_modulus;
            else throw ConfigError("mc.symbols", "expected unit_modulus or gaussian");
        }
    }
    if (j.contains("bcd")) {
        check_keys(j["bcd"], "bcd", {"max_outer", "tol"});
        read(j["bcd"], "max_outer", c.max_outer, "bcd");
        read(j["bcd"], "tol", c.bcd_tol, "bcd");
    }
    if (j.contains("bisection")) {
        check_keys(j["bisection"], "bisection", {"eta_max", "epsilon"});
        read(j["bisection"], "eta_max", c.eta_max, "bisection");
        read(j["bisection"], "epsilon", c.epsilon, "bisection");
    }
    read(j, "workers", c.workers, "config");
    read(j, "timing", c.timing, "config");
    c.validate();
    return c;
}

std::vector<std::string> sweep_labels(const ExperimentConfig& c) {
    if (c.sweep.param == SweepParam::none) return {"-"};
    return c.sweep.values;
}

ScenarioConfig apply_sweep(const ExperimentConfig& c, std::string_view v) {
    ScenarioConfig sc = c.scenario;
    switch (c.sweep.param) {
        case SweepParam::none: break;
        case SweepParam::p_m_dbm: sc.uxnb_power_dbm = parse_real("sweep.values", v); break;
        case SweepParam::M: sc.num_uxnbs = parse_count("sweep.values", v); break;
        case SweepParam::K: sc.num_users = parse_count("sweep.values", v); break;
        case SweepParam::S: sc.radio.haps_rx = UpaShape::near_square(parse_count("sweep.values", v)); break;
        case SweepParam::environment: sc.env = Environment::preset(environment_kind_from_string(v)); break;
    }
    return sc;
}

std::uint64_t drop_seed(std::uint64_t root, std::size_t drop) {
    return derive_stream_seed(root, {stream_tag::experiment_item, drop});
}

ResultRow evaluate_drop(const ExperimentConfig& c, std::string_view sweep_value, Scheme scheme, std::size_t drop) {
    const auto t0 = std::chrono::steady_clock::now();
    ResultRow row;
    row.sweep_param = std::string(to_string(c.sweep.param));
    row.sweep_value = std::string(sweep_value);
    row.scheme = scheme;
    row.drop = drop;
    row.seed = drop_seed(c.seed, drop);

    BisectionOptions bis;
    bis.eta_max = c.eta_max;
    bis.epsilon = c.epsilon;
    try {
        const auto s = build_scenario(apply_sweep(c, sweep_value), row.seed);
        switch (scheme) {
            case Scheme::aerial_cellfree: {
                BcdOptions o;
                o.mode = c.optimize;
                o.max_outer = c.max_outer;
                o.tol = c.bcd_tol;
                o.bisection = bis;
                const auto tr = bcd_optimize(s, o);
                row.optimize = c.optimize;
                row.min_sinr = tr.final_min_sinr();
                row.iters_outer = tr.outer_iterations();
                row.iters_bisection = tr.bisection_iterations();
                break;
            }
            case Scheme::aerial_cellular: {
                row.optimize = OptimizeMode::none;
                row.min_sinr = min_sinr(aerial_cellular_sinr(s, compute_link_gains(s))).value;
                break;
            }
            case Scheme::terrestrial_cellfree: {
                // APs are on the ground: only the power block applies.
                const auto t = terrestrial_scenario(s, c.scenario.terrestrial_ap_height_m);
                const auto g = terrestrial_gains(t);
                PowerAllocation alloc = PowerAllocation::uniform(t);
                row.optimize = c.optimize == OptimizeMode::none ? OptimizeMode::none : OptimizeMode::power;
                if (row.optimize == OptimizeMode::power) {
                    const auto r = terrestrial_power(t, g, bis);
                    alloc = r.alloc;
                    row.iters_outer = 1;
                    row.iters_bisection = r.iterations;
                }
                row.min_sinr = min_sinr(terrestrial_cellfree_sinr(t, g, alloc)).value;
                break;
            }
        }
        row.min_rate = rate_from_sinr(row.min_sinr);
    } catch (const SolverError& e) {
        row.ok = false;
        row.solver_failure = true;
        row.error = std::string("solver failure at outer iteration ") + std::to_string(e.iteration()) + ": " + e.what();
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    if (!row.ok) {
        row.min_sinr = std::nan("");
        row.min_rate = std::nan("");
    }
    if (c.timing)
        row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

bool ExperimentResult::any_solver_failure() const {
    return std::any_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.solver_failure; });
}

std::vector<double> ExperimentResult::min_rates(std::string_view v, Scheme scheme) const {
    std::vector<double> out;
    for (const auto& r : rows)
        if (r.ok && r.sweep_value == v && r.scheme == scheme) out.push_back(r.min_rate);
    return out;
}

double ExperimentResult::median(std::string_view v, Scheme scheme) const { return median_of(min_rates(v, scheme)); }

double ExperimentResult::mean(std::string_view v, Scheme scheme) const {
    const auto r = min_rates(v, scheme);
    if (r.empty()) return std::nan("");
    double s = 0.0;
    for (double x : r) s += x;
    return s / static_cast<double>(r.size());
}

ExperimentResult run(const ExperimentConfig& c) {
    c.validate();
    struct Item {
        std::string value;
        Scheme scheme;
        std::size_t drop;
    };
    std::vector<Item> items;
    const auto labels = sweep_labels(c);
    for (const auto& v : labels)
        for (auto sch : c.schemes)
            for (std::size_t d = 0; d < c.drops; ++d) items.push_back({v, sch, d});

    ExperimentResult res;
    res.rows.resize(items.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < items.size(); i = next++)
            res.rows[i] = evaluate_drop(c, items[i].value, items[i].scheme, items[i].drop);
    };
    const unsigned n = std::min<unsigned>(c.workers, static_cast<unsigned>(items.size()));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& v : labels) {
        for (auto sch : c.schemes) {
            SweepSummary s;
            s.sweep_value = v;
            s.scheme = sch;
            s.drops_ok = res.min_rates(v, sch).size();
            s.mean_min_rate = res.mean(v, sch);
            s.median_min_rate = res.median(v, sch);
            res.summary.push_back(s);
        }
    }
    return res;
}

void write_csv(std::ostream& os, const ExperimentResult& result) {
    os << "sweep_param,sweep_value,scheme,optimize,drop,min_sinr_db,min_rate_bps_hz,iters_outer,iters_bisection,"
          "runtime_ms,seed\n";
    for (const auto& r : result.rows) {
        os << csv_field(r.sweep_param) << ',' << csv_field(r.sweep_value) << ',' << to_string(r.scheme) << ','
           << to_string(r.optimize) << ',' << r.drop << ',' << num(r.ok ? to_db(r.min_sinr) : std::nan("")) << ','
           << num(r.min_rate) << ',' << r.iters_outer << ',' << r.iters_bisection << ',' << num(r.runtime_ms) << ','
           << r.seed << '\n';
    }
}

std::vector<CdfRow> cdf_experiment(const ExperimentConfig& c, ExperimentResult* raw) {
    if (c.drops < 50) throw ConfigError("drops", "a CDF needs at least 50 drops");
    auto res = run(c);
    std::vector<CdfRow> out;
    for (const auto& v : sweep_labels(c)) {
        for (auto sch : c.schemes) {
            auto r = res.min_rates(v, sch);
            std::sort(r.begin(), r.end());
            for (std::size_t i = 0; i < r.size(); ++i)
                out.push_back({v, sch, i, r[i], static_cast<double>(i + 1) / static_cast<double>(r.size())});
        }
    }
    if (raw) *raw = std::move(res);
    return out;
}

void write_cdf_csv(std::ostream& os, const std::vector<CdfRow>& rows, const ExperimentConfig& c) {
    os << "sweep_param,sweep_value,scheme,optimize,rank,min_rate_bps_hz,cdf,seed\n";
    for (const auto& r : rows)
        os << to_string(c.sweep.param) << ',' << csv_field(r.sweep_value) << ',' << to_string(r.scheme) << ','
           << to_string(c.optimize) << ',' << r.rank << ',' << num(r.min_rate) << ',' << num(r.level) << ',' << c.seed
           << '\n';
}

McReport mc_validate(const ExperimentConfig& c) {
    if (!c.mc.enabled) throw ConfigError("mc.enabled", "Monte Carlo validation is disabled");
    McOptions o;
    o.trials = c.mc.trials;
    o.batches = c.mc.batches;
    o.seed = c.seed;
    o.symbols = c.mc.symbols;
    o.workers = c.workers;
    o.validate();
    const auto s = build_scenario(apply_sweep(c, sweep_labels(c).front()), drop_seed(c.seed, 0));
    GainOverrides ov;
    ov.force_los = c.mc.force_los;
    ov.force_unit_transmittance = c.mc.unit_transmittance;
    return estimate_empirical_sinr(s, compute_link_gains(s, ov), PowerAllocation::uniform(s), o);
}

}  // namespace aerocf
