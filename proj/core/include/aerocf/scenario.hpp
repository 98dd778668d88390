#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace aerocf {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Element counts of a uniform planar array along its width and length.
/// Elements are indexed width-major: n = w * length + l.
struct UpaShape {
    int width = 1;
    int length = 1;

    int count() const noexcept { return width * length; }

    /// Most square factorization width <= length of `elements`.
    static UpaShape near_square(int elements);

    friend bool operator==(const UpaShape&, const UpaShape&) = default;
};

/// Converts a noise power spectral density (dBm/Hz) over `bandwidth_hz` to watts.
double noise_power_w(double psd_dbm_per_hz, double bandwidth_hz);
double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

struct RadioParams {
    double f_sub6_hz = 2e9;
    double f_thz_hz = 120e9;
    double bandwidth_hz = 1e6;
    double noise_psd_dbm_hz = -174.0;
    double sigma2_uxnb_w = noise_power_w(-174.0, 1e6);  ///< per UxNB receive element
    double sigma2_haps_w = noise_power_w(-174.0, 1e6);  ///< per HAPS receive element
    UpaShape uxnb_rx{2, 2};   ///< N
    UpaShape uxnb_tx{3, 3};   ///< G
    UpaShape haps_rx{20, 20}; ///< S

    int n_rx() const noexcept { return uxnb_rx.count(); }
    int g_tx() const noexcept { return uxnb_tx.count(); }
    int s_rx() const noexcept { return haps_rx.count(); }

    void validate() const;

    friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

enum class EnvironmentKind { suburban, urban, dense_urban, custom };

std::string_view to_string(EnvironmentKind kind);
EnvironmentKind environment_kind_from_string(std::string_view name);

/// Air-to-ground propagation constants: LoS-probability parameters and excess losses.
struct Environment {
    EnvironmentKind kind = EnvironmentKind::urban;
    double a = 9.61;          ///< unitless
    double b = 0.16;          ///< 1/degree
    double eta_los_db = 1.0;
    double eta_nlos_db = 20.0;

    static Environment preset(EnvironmentKind kind);
    /// Loads a preset table in the `data/environments.json` format.
    static Environment from_table(std::string_view table_json, std::string_view name);

    void validate() const;

    friend bool operator==(const Environment&, const Environment&) = default;
};

struct Area {
    double x_min = 0.0;
    double x_max = 1000.0;
    double y_min = 0.0;
    double y_max = 1000.0;

    Vec2 center() const noexcept { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
    bool contains(double x, double y) const noexcept {
        return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
    }

    friend bool operator==(const Area&, const Area&) = default;
};

/// Geometry, radio parameters and environment of one network instance:
/// K ground users, M UxNBs and one HAPS. Treated as immutable once built;
/// use `with_uxnb_positions` to derive a moved copy.
struct NetworkScenario {
    static constexpr int kSchemaVersion = 1;

    std::vector<Vec2> users;
    std::vector<Vec3> uxnbs;
    Vec3 haps;
    Area area;
    RadioParams radio;
    Environment env;
    double absorption_db_per_km = 0.5;  ///< K_a
    double effective_height_m = 1600.0; ///< h_e
    std::vector<double> user_power_w;   ///< P_k
    std::vector<double> uxnb_power_w;   ///< P_m

    std::size_t num_users() const noexcept { return users.size(); }
    std::size_t num_uxnbs() const noexcept { return uxnbs.size(); }

    /// Throws ConfigError / GeometryError on any violated invariant.
    void validate() const;

    /// Copy with UxNB horizontal positions replaced (heights unchanged).
    NetworkScenario with_uxnb_positions(const std::vector<Vec2>& xy) const;

    std::string to_json() const;
    static NetworkScenario from_json(std::string_view text);

    friend bool operator==(const NetworkScenario&, const NetworkScenario&) = default;
};

/// Scenario-level experiment parameters. Defaults are the reference deployment:
/// 1 km square, K = M = 16, N = 4, G = 9, S = 400, 120 m UxNBs, 20 km HAPS.
struct ScenarioConfig {
    int num_users = 16;
    int num_uxnbs = 16;
    Area area;
    double uxnb_height_m = 120.0;
    double haps_altitude_m = 20000.0;
    double terrestrial_ap_height_m = 10.0;
    RadioParams radio;
    Environment env;
    double absorption_db_per_km = 0.5;
    double effective_height_m = 1600.0;
    double user_power_w = 0.2;
    double uxnb_power_dbm = 25.0;

    void validate() const;
};

/// Drops users i.i.d. uniformly over the area, places UxNBs on a row-major
/// ceil(sqrt(M))-column grid at the cell centres, and the HAPS above the area centre.
/// Deterministic for a fixed seed.
NetworkScenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);

/// Row-major grid of `count` points at cell centres over `area`.
std::vector<Vec2> grid_positions(const Area& area, int count);

struct AccessGeometry {
    double distance_m = 0.0;
    double elevation_deg = 0.0;
    double azimuth_rad = 0.0;
};

struct BackhaulGeometry {
    double distance_m = 0.0;
    double elevation_deg = 0.0;  ///< of the HAPS seen from the UxNB
    double azimuth_rad = 0.0;    ///< of the UxNB seen from the HAPS nadir, east = 0
};

AccessGeometry access_geometry(const NetworkScenario& s, std::size_t k, std::size_t m);
AccessGeometry access_geometry(const Vec2& user, const Vec3& uxnb);
BackhaulGeometry backhaul_geometry(const NetworkScenario& s, std::size_t m);
BackhaulGeometry backhaul_geometry(const Vec3& uxnb, const Vec3& haps);

}  // namespace aerocf
