#include "aerocf/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "aerocf/error.hpp"
#include "aerocf/random.hpp"
#include "json.hpp"

namespace aerocf {

using nlohmann::json;

UpaShape UpaShape::near_square(int elements) {
    if (elements < 1) throw ConfigError("antenna count", "must be >= 1");
    int width = static_cast<int>(std::floor(std::sqrt(static_cast<double>(elements))));
    while (width > 1 && elements % width != 0) --width;
    return {width, elements / width};
}

double noise_power_w(double psd_dbm_per_hz, double bandwidth_hz) {
    return std::pow(10.0, (psd_dbm_per_hz - 30.0) / 10.0) * bandwidth_hz;
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

void RadioParams::validate() const {
    if (!(f_sub6_hz > 0.0)) throw ConfigError("radio.f_sub6_hz", "must be > 0");
    if (!(f_thz_hz > 0.0)) throw ConfigError("radio.f_thz_hz", "must be > 0");
    if (!(bandwidth_hz > 0.0)) throw ConfigError("radio.bandwidth_hz", "must be > 0");
    if (!(sigma2_uxnb_w >= 0.0)) throw ConfigError("radio.sigma2_uxnb_w", "must be >= 0");
    if (!(sigma2_haps_w >= 0.0)) throw ConfigError("radio.sigma2_haps_w", "must be >= 0");
    auto check = [](const UpaShape& u, const char* name) {
        if (u.width < 1 || u.length < 1) throw ConfigError(name, "element counts must be >= 1");
    };
    check(uxnb_rx, "radio.uxnb_rx");
    check(uxnb_tx, "radio.uxnb_tx");
    check(haps_rx, "radio.haps_rx");
}

std::string_view to_string(EnvironmentKind kind) {
    switch (kind) {
        case EnvironmentKind::suburban: return "suburban";
        case EnvironmentKind::urban: return "urban";
        case EnvironmentKind::dense_urban: return "dense_urban";
        case EnvironmentKind::custom: return "custom";
    }
    return "custom";
}

EnvironmentKind environment_kind_from_string(std::string_view name) {
    if (name == "suburban") return EnvironmentKind::suburban;
    if (name == "urban") return EnvironmentKind::urban;
    if (name == "dense_urban") return EnvironmentKind::dense_urban;
    if (name == "custom") return EnvironmentKind::custom;
    throw ConfigError("environment", "unknown environment '" + std::string(name) + "'");
}

Environment Environment::preset(EnvironmentKind kind) {
    switch (kind) {
        case EnvironmentKind::suburban: return {kind, 4.88, 0.43, 0.1, 21.0};
        case EnvironmentKind::urban: return {kind, 9.61, 0.16, 1.0, 20.0};
        case EnvironmentKind::dense_urban: return {kind, 12.8, 0.11, 1.6, 23.0};
        case EnvironmentKind::custom: break;
    }
    throw ConfigError("environment", "custom environments have no preset");
}

Environment Environment::from_table(std::string_view table_json, std::string_view name) {
    json table;
    try {
        table = json::parse(table_json);
    } catch (const json::exception& e) {
        throw ConfigError("environments", e.what());
    }
    const auto& envs = table.at("environments");
    const std::string key(name);
    if (!envs.contains(key)) throw ConfigError("environment", "not in table: " + key);
    const auto& e = envs.at(key);
    Environment env;
    env.kind = (key == "suburban" || key == "urban" || key == "dense_urban")
                   ? environment_kind_from_string(key)
                   : EnvironmentKind::custom;
    env.a = e.at("A").get<double>();
    env.b = e.at("B").get<double>();
    env.eta_los_db = e.at("eta_los_db").get<double>();
    env.eta_nlos_db = e.at("eta_nlos_db").get<double>();
    env.validate();
    return env;
}

void Environment::validate() const {
    if (!(a > 0.0)) throw ConfigError("environment.A", "must be > 0");
    if (!(b > 0.0)) throw ConfigError("environment.B", "must be > 0");
    if (!(eta_los_db >= 0.0)) throw ConfigError("environment.eta_los_db", "must be >= 0");
    if (!(eta_nlos_db >= eta_los_db))
        throw ConfigError("environment.eta_nlos_db", "must be >= eta_los_db");
}

void NetworkScenario::validate() const {
    if (users.empty()) throw ConfigError("users", "at least one user required");
    if (uxnbs.empty()) throw ConfigError("uxnbs", "at least one UxNB required");
    if (!(area.x_min < area.x_max)) throw ConfigError("area.x", "x_min must be < x_max");
    if (!(area.y_min < area.y_max)) throw ConfigError("area.y", "y_min must be < y_max");
    radio.validate();
    env.validate();
    if (user_power_w.size() != users.size())
        throw ConfigError("user_power_w", "one entry per user required");
    if (uxnb_power_w.size() != uxnbs.size())
        throw ConfigError("uxnb_power_w", "one entry per UxNB required");
    for (double p : user_power_w)
        if (!(p > 0.0)) throw ConfigError("user_power_w", "powers must be > 0");
    for (double p : uxnb_power_w)
        if (!(p > 0.0)) throw ConfigError("uxnb_power_w", "powers must be > 0");
    if (!(absorption_db_per_km >= 0.0))
        throw ConfigError("absorption_db_per_km", "must be >= 0");
    if (!(effective_height_m >= 0.0)) throw ConfigError("effective_height_m", "must be >= 0");
    for (const auto& u : uxnbs) {
        if (!area.contains(u.x, u.y))
            throw GeometryError("UxNB outside the horizontal flight range");
        if (!(u.z > 0.0)) throw GeometryError("UxNB height must be > 0");
        if (!(u.z < haps.z)) throw GeometryError("UxNB must fly below the HAPS");
    }
}

NetworkScenario NetworkScenario::with_uxnb_positions(const std::vector<Vec2>& xy) const {
    if (xy.size() != uxnbs.size()) throw ConfigError("uxnbs", "position count mismatch");
    NetworkScenario out = *this;
    for (std::size_t m = 0; m < xy.size(); ++m) {
        out.uxnbs[m].x = xy[m].x;
        out.uxnbs[m].y = xy[m].y;
    }
    return out;
}

namespace {

json upa_to_json(const UpaShape& u) { return json::array({u.width, u.length}); }

UpaShape upa_from_json(const json& j) { return {j.at(0).get<int>(), j.at(1).get<int>()}; }

}  // namespace

std::string NetworkScenario::to_json() const {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["users"] = json::array();
    for (const auto& u : users) j["users"].push_back({u.x, u.y});
    j["uxnbs"] = json::array();
    for (const auto& d : uxnbs) j["uxnbs"].push_back({d.x, d.y, d.z});
    j["haps"] = {haps.x, haps.y, haps.z};
    j["area"] = {area.x_min, area.x_max, area.y_min, area.y_max};
    j["radio"] = {
        {"f_sub6_hz", radio.f_sub6_hz},
        {"f_thz_hz", radio.f_thz_hz},
        {"bandwidth_hz", radio.bandwidth_hz},
        {"noise_psd_dbm_hz", radio.noise_psd_dbm_hz},
        {"sigma2_uxnb_w", radio.sigma2_uxnb_w},
        {"sigma2_haps_w", radio.sigma2_haps_w},
        {"uxnb_rx", upa_to_json(radio.uxnb_rx)},
        {"uxnb_tx", upa_to_json(radio.uxnb_tx)},
        {"haps_rx", upa_to_json(radio.haps_rx)},
    };
    j["env"] = {{"name", std::string(to_string(env.kind))},
                {"A", env.a},
                {"B", env.b},
                {"eta_los_db", env.eta_los_db},
                {"eta_nlos_db", env.eta_nlos_db}};
    j["absorption_db_per_km"] = absorption_db_per_km;
    j["effective_height_m"] = effective_height_m;
    j["user_power_w"] = user_power_w;
    j["uxnb_power_w"] = uxnb_power_w;
    return j.dump(2);
}

NetworkScenario NetworkScenario::from_json(std::string_view text) {
    NetworkScenario s;
    try {
        const json j = json::parse(text);
        const int version = j.at("schema_version").get<int>();
        if (version != kSchemaVersion)
            throw ConfigError("schema_version", "unsupported version " + std::to_string(version));
        for (const auto& u : j.at("users")) s.users.push_back({u.at(0), u.at(1)});
        for (const auto& d : j.at("uxnbs")) s.uxnbs.push_back({d.at(0), d.at(1), d.at(2)});
        const auto& h = j.at("haps");
        s.haps = {h.at(0), h.at(1), h.at(2)};
        const auto& a = j.at("area");
        s.area = {a.at(0), a.at(1), a.at(2), a.at(3)};
        const auto& r = j.at("radio");
        s.radio.f_sub6_hz = r.at("f_sub6_hz");
        s.radio.f_thz_hz = r.at("f_thz_hz");
        s.radio.bandwidth_hz = r.at("bandwidth_hz");
        s.radio.noise_psd_dbm_hz = r.at("noise_psd_dbm_hz");
        s.radio.sigma2_uxnb_w = r.at("sigma2_uxnb_w");
        s.radio.sigma2_haps_w = r.at("sigma2_haps_w");
        s.radio.uxnb_rx = upa_from_json(r.at("uxnb_rx"));
        s.radio.uxnb_tx = upa_from_json(r.at("uxnb_tx"));
        s.radio.haps_rx = upa_from_json(r.at("haps_rx"));
        const auto& e = j.at("env");
        s.env.kind = environment_kind_from_string(e.at("name").get<std::string>());
        s.env.a = e.at("A");
        s.env.b = e.at("B");
        s.env.eta_los_db = e.at("eta_los_db");
        s.env.eta_nlos_db = e.at("eta_nlos_db");
        s.absorption_db_per_km = j.at("absorption_db_per_km");
        s.effective_height_m = j.at("effective_height_m");
        s.user_power_w = j.at("user_power_w").get<std::vector<double>>();
        s.uxnb_power_w = j.at("uxnb_power_w").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ConfigError("scenario", e.what());
    }
    s.validate();
    return s;
}

void ScenarioConfig::validate() const {
    if (num_users < 1) throw ConfigError("K", "must be >= 1");
    if (num_uxnbs < 1) throw ConfigError("M", "must be >= 1");
    if (!(area.x_min < area.x_max)) throw ConfigError("area.x", "x_min must be < x_max");
    if (!(area.y_min < area.y_max)) throw ConfigError("area.y", "y_min must be < y_max");
    if (!(uxnb_height_m > 0.0)) throw ConfigError("uxnb_height_m", "must be > 0");
    if (!(haps_altitude_m > uxnb_height_m))
        throw ConfigError("haps_altitude_m", "must exceed the UxNB height");
    if (!(terrestrial_ap_height_m > 0.0))
        throw ConfigError("terrestrial_ap_height_m", "must be > 0");
    if (!(user_power_w > 0.0)) throw ConfigError("user_power_w", "must be > 0");
    if (!std::isfinite(uxnb_power_dbm)) throw ConfigError("uxnb_power_dbm", "must be finite");
    radio.validate();
    env.validate();
    if (!(absorption_db_per_km >= 0.0))
        throw ConfigError("absorption_db_per_km", "must be >= 0");
    if (!(effective_height_m >= 0.0)) throw ConfigError("effective_height_m", "must be >= 0");
}

std::vector<Vec2> grid_positions(const Area& area, int count) {
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(count))));
    const int rows = (count + cols - 1) / cols;
    const double dx = (area.x_max - area.x_min) / cols;
    const double dy = (area.y_max - area.y_min) / rows;
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int r = i / cols;
        const int c = i % cols;
        out.push_back({area.x_min + (c + 0.5) * dx, area.y_min + (r + 0.5) * dy});
    }
    return out;
}

NetworkScenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
    config.validate();
    NetworkScenario s;
    s.area = config.area;
    s.radio = config.radio;
    s.env = config.env;
    s.absorption_db_per_km = config.absorption_db_per_km;
    s.effective_height_m = config.effective_height_m;

    auto rng = make_engine(seed, {stream_tag::user_drop});
    std::uniform_real_distribution<double> ux(config.area.x_min, config.area.x_max);
    std::uniform_real_distribution<double> uy(config.area.y_min, config.area.y_max);
    s.users.reserve(static_cast<std::size_t>(config.num_users));
    for (int k = 0; k < config.num_users; ++k) {
        const double x = ux(rng);
        const double y = uy(rng);
        s.users.push_back({x, y});
    }
    for (const auto& p : grid_positions(config.area, config.num_uxnbs))
        s.uxnbs.push_back({p.x, p.y, config.uxnb_height_m});
    const Vec2 c = config.area.center();
    s.haps = {c.x, c.y, config.haps_altitude_m};
    s.user_power_w.assign(s.users.size(), config.user_power_w);
    s.uxnb_power_w.assign(s.uxnbs.size(), dbm_to_watt(config.uxnb_power_dbm));
    s.validate();
    return s;
}

namespace {

double elevation_deg(double rise, double horizontal) {
    return std::clamp(std::atan2(rise, horizontal) * (180.0 / std::numbers::pi), 0.0, 90.0);
}

}  // namespace

AccessGeometry access_geometry(const Vec2& user, const Vec3& uxnb) {
    const double dx = user.x - uxnb.x;
    const double dy = user.y - uxnb.y;
    AccessGeometry g;
    g.distance_m = std::sqrt(dx * dx + dy * dy + uxnb.z * uxnb.z);
    g.elevation_deg = elevation_deg(uxnb.z, std::hypot(dx, dy));
    g.azimuth_rad = std::atan2(dy, dx);
    return g;
}

AccessGeometry access_geometry(const NetworkScenario& s, std::size_t k, std::size_t m) {
    return access_geometry(s.users[k], s.uxnbs[m]);
}

BackhaulGeometry backhaul_geometry(const Vec3& uxnb, const Vec3& haps) {
    const double rise = haps.z - uxnb.z;
    if (!(rise > 0.0)) throw GeometryError("UxNB at or above the HAPS altitude");
    const double dx = uxnb.x - haps.x;
    const double dy = uxnb.y - haps.y;
    BackhaulGeometry g;
    g.distance_m = std::sqrt(dx * dx + dy * dy + rise * rise);
    g.elevation_deg = elevation_deg(rise, std::hypot(dx, dy));
    g.azimuth_rad = std::atan2(dy, dx);
    return g;
}

BackhaulGeometry backhaul_geometry(const NetworkScenario& s, std::size_t m) {
    return backhaul_geometry(s.uxnbs[m], s.haps);
}

}  // namespace aerocf
