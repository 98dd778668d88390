#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "aerocf/random.hpp"
#include "aerocf/scenario.hpp"

namespace aerocf {

inline constexpr double kSpeedOfLight = 3e8;

using ComplexVector = Eigen::VectorXcd;

/// Channel power gain at the 1 m reference distance, (4 pi f / C)^-2.
double reference_gain(double frequency_hz);
double free_space_path_loss_db(double distance_m, double frequency_hz);

/// Air-to-ground LoS probability 1 / (1 + A exp(-B (theta - A))), theta in degrees.
/// Throws DomainError outside [0, 90].
double los_probability(double elevation_deg, const Environment& env);

struct AccessGain {
    double beta2 = 0.0;  ///< large-scale power gain
    double p_los = 0.0;
    double eta = 1.0;    ///< excess-loss factor, linear, <= 1
    double beta0 = 0.0;  ///< reference gain
};

/// Large-scale user-to-UxNB gain. Throws DomainError below the 1 m reference distance.
AccessGain access_gain(const AccessGeometry& geom, const RadioParams& radio, const Environment& env);

/// Same as access_gain with the LoS probability pinned to `p_los`.
AccessGain access_gain_with_los(const AccessGeometry& geom, const RadioParams& radio,
                                const Environment& env, double p_los);

struct BackhaulGain {
    double rho2 = 0.0;   ///< free-space power gain
    double tau = 1.0;    ///< Beer-Lambert transmittance
    double gamma2 = 0.0; ///< rho2 * tau
    double effective_height_m = 0.0;
};

BackhaulGain backhaul_gain(const BackhaulGeometry& geom, const RadioParams& radio,
                           double absorption_db_per_km, double effective_height_m);

/// Half-wavelength UPA response: exp(j bulk) * exp(j pi w sin(el) cos(az)) * exp(j pi l sin(el) sin(az)).
ComplexVector upa_steering(const UpaShape& shape, double elevation_deg, double azimuth_rad,
                           double bulk_phase_rad);

/// Receive response of the UxNB array toward user k (a_km), including the 2 pi d / lambda term.
ComplexVector steering_access(const AccessGeometry& geom, const RadioParams& radio);
/// UxNB transmit response toward the HAPS (b_m), including the 2 pi d / lambda term.
ComplexVector steering_backhaul_tx(const BackhaulGeometry& geom, const RadioParams& radio);
/// HAPS receive response toward UxNB m (c_m); no bulk-distance term.
ComplexVector steering_backhaul_rx(const BackhaulGeometry& geom, const RadioParams& radio);

/// One Ricean draw of the channel across the UxNB receive array:
/// h_n = beta * (sqrt(p_los) a_n + sqrt(1 - p_los) w_n), w_n ~ CN(0, 1) i.i.d.
template <class Engine>
ComplexVector sample_access_channel(const AccessGain& gain, const ComplexVector& steering, Engine& rng) {
    const double amplitude = std::sqrt(gain.beta2);
    const double los = std::sqrt(gain.p_los);
    const double nlos = std::sqrt(std::max(0.0, 1.0 - gain.p_los));
    ComplexVector h(steering.size());
    for (Eigen::Index n = 0; n < steering.size(); ++n) {
        std::complex<double> diffuse{0.0, 0.0};
        if (nlos > 0.0) diffuse = complex_normal(rng);
        h[n] = amplitude * (los * steering[n] + nlos * diffuse);
    }
    return h;
}

/// All large-scale gains of a scenario: per-(k, m) access gains and per-m backhaul gains.
struct LinkGains {
    Eigen::MatrixXd beta2;  ///< K x M
    Eigen::MatrixXd p_los;  ///< K x M
    Eigen::MatrixXd eta;    ///< K x M
    std::vector<BackhaulGain> backhaul;

    std::size_t num_users() const noexcept { return static_cast<std::size_t>(beta2.rows()); }
    std::size_t num_uxnbs() const noexcept { return static_cast<std::size_t>(beta2.cols()); }
};

struct GainOverrides {
    bool force_los = false;                ///< p_los = 1 on every access link
    bool force_unit_transmittance = false; ///< tau = 1 on every backhaul link
};

LinkGains compute_link_gains(const NetworkScenario& s, const GainOverrides& overrides = {});

}  // namespace aerocf
