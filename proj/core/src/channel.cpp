#include "aerocf/channel.hpp"

#include <numbers>

#include "aerocf/error.hpp"

namespace aerocf {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double deg) { return deg * (kPi / 180.0); }

}  // namespace

double reference_gain(double frequency_hz) {
    const double x = 4.0 * kPi * frequency_hz / kSpeedOfLight;
    return 1.0 / (x * x);
}

double free_space_path_loss_db(double distance_m, double frequency_hz) {
    return 20.0 * std::log10(4.0 * kPi * frequency_hz * distance_m / kSpeedOfLight);
}

double los_probability(double elevation_deg, const Environment& env) {
    if (!(elevation_deg >= 0.0 && elevation_deg <= 90.0))
        throw DomainError("elevation angle outside [0, 90] degrees");
    return 1.0 / (1.0 + env.a * std::exp(-env.b * (elevation_deg - env.a)));
}

AccessGain access_gain_with_los(const AccessGeometry& geom, const RadioParams& radio,
                                const Environment& env, double p_los) {
    if (!(geom.distance_m >= 1.0)) throw DomainError("access distance below the 1 m reference");
    AccessGain g;
    g.p_los = p_los;
    g.beta0 = reference_gain(radio.f_sub6_hz);
    const double excess_db = p_los * env.eta_los_db + (1.0 - p_los) * env.eta_nlos_db;
    g.eta = std::pow(10.0, -excess_db / 10.0);
    g.beta2 = g.eta * g.beta0 / (geom.distance_m * geom.distance_m);
    return g;
}

AccessGain access_gain(const AccessGeometry& geom, const RadioParams& radio, const Environment& env) {
    return access_gain_with_los(geom, radio, env, los_probability(geom.elevation_deg, env));
}

BackhaulGain backhaul_gain(const BackhaulGeometry& geom, const RadioParams& radio,
                           double absorption_db_per_km, double effective_height_m) {
    if (!(geom.distance_m > 1.0)) throw DomainError("backhaul distance below the 1 m reference");
    const double sin_el = std::sin(deg2rad(geom.elevation_deg));
    if (!(sin_el > 0.0)) throw GeometryError("HAPS not above the UxNB");
    BackhaulGain g;
    g.rho2 = reference_gain(radio.f_thz_hz) / (geom.distance_m * geom.distance_m);
    g.effective_height_m = effective_height_m / sin_el;
    g.tau = std::pow(10.0, -absorption_db_per_km * (g.effective_height_m / 1000.0) / 10.0);
    g.gamma2 = g.rho2 * g.tau;
    return g;
}

ComplexVector upa_steering(const UpaShape& shape, double elevation_deg, double azimuth_rad,
                           double bulk_phase_rad) {
    const double sin_el = std::sin(deg2rad(elevation_deg));
    const double ux = kPi * sin_el * std::cos(azimuth_rad);
    const double uy = kPi * sin_el * std::sin(azimuth_rad);
    ComplexVector v(shape.count());
    for (int w = 0; w < shape.width; ++w) {
        for (int l = 0; l < shape.length; ++l) {
            v[w * shape.length + l] = std::polar(1.0, bulk_phase_rad + ux * w + uy * l);
        }
    }
    return v;
}

ComplexVector steering_access(const AccessGeometry& geom, const RadioParams& radio) {
    const double lambda = kSpeedOfLight / radio.f_sub6_hz;
    const double bulk = std::fmod(2.0 * kPi * geom.distance_m / lambda, 2.0 * kPi);
    return upa_steering(radio.uxnb_rx, geom.elevation_deg, geom.azimuth_rad, bulk);
}

ComplexVector steering_backhaul_tx(const BackhaulGeometry& geom, const RadioParams& radio) {
    const double lambda = kSpeedOfLight / radio.f_thz_hz;
    const double bulk = std::fmod(2.0 * kPi * geom.distance_m / lambda, 2.0 * kPi);
    return upa_steering(radio.uxnb_tx, geom.elevation_deg, geom.azimuth_rad, bulk);
}

ComplexVector steering_backhaul_rx(const BackhaulGeometry& geom, const RadioParams& radio) {
    return upa_steering(radio.haps_rx, geom.elevation_deg, geom.azimuth_rad, 0.0);
}

LinkGains compute_link_gains(const NetworkScenario& s, const GainOverrides& overrides) {
    const auto K = static_cast<Eigen::Index>(s.num_users());
    const auto M = static_cast<Eigen::Index>(s.num_uxnbs());
    LinkGains out;
    out.beta2.resize(K, M);
    out.p_los.resize(K, M);
    out.eta.resize(K, M);
    for (Eigen::Index k = 0; k < K; ++k) {
        for (Eigen::Index m = 0; m < M; ++m) {
            const auto geom = access_geometry(s, static_cast<std::size_t>(k), static_cast<std::size_t>(m));
            const auto g = overrides.force_los ? access_gain_with_los(geom, s.radio, s.env, 1.0)
                                               : access_gain(geom, s.radio, s.env);
            out.beta2(k, m) = g.beta2;
            out.p_los(k, m) = g.p_los;
            out.eta(k, m) = g.eta;
        }
    }
    out.backhaul.reserve(static_cast<std::size_t>(M));
    for (Eigen::Index m = 0; m < M; ++m) {
        const auto geom = backhaul_geometry(s, static_cast<std::size_t>(m));
        auto g = backhaul_gain(geom, s.radio, s.absorption_db_per_km, s.effective_height_m);
        if (overrides.force_unit_transmittance) {
            g.tau = 1.0;
            g.gamma2 = g.rho2;
        }
        out.backhaul.push_back(g);
    }
    return out;
}

}  // namespace aerocf
