#include "rfsim/propagation.hpp"

#include <algorithm>
#include <cmath>

#include "rfsim/errors.hpp"

namespace rfsim {

LinkGeometry link_geometry(const Position& tx, const Position& rx, double f_c_hz) {
    if (f_c_hz <= 0.0) throw NumericError("link_geometry: carrier frequency must be positive");
    if (tx.x == rx.x && tx.y == rx.y && tx.z == rx.z)
        throw NumericError("link_geometry: coincident transmitter and receiver");
    if (rx.z <= 0.0) throw NumericError("link_geometry: receiver must be above ground");
    if (tx.z < 0.0) throw NumericError("link_geometry: transmitter below ground");

    LinkGeometry g;
    const double dx = tx.x - rx.x, dy = tx.y - rx.y;
    g.d_2d = std::hypot(dx, dy);
    g.d_los = std::hypot(g.d_2d, rx.z - tx.z);
    g.d_refl = std::hypot(g.d_2d, rx.z + tx.z);
    g.theta_los = std::atan2(tx.z - rx.z, g.d_2d);
    g.theta_refl = std::atan2(tx.z + rx.z, g.d_2d);
    const double phi = (g.d_2d == 0.0) ? 0.0 : std::atan2(dy, dx);
    g.phi_los = phi;
    g.phi_refl = phi;
    const double lambda = kSpeedOfLight / f_c_hz;
    g.delta_phase = 2.0 * kPi * (g.d_refl - g.d_los) / lambda;
    return g;
}

namespace {

// Gains for one ray; with an attitude the lookup angles are first passed
// through the attitude rotation.
double ray_gain_product(const PropagationParams& params, const SphericalDirection& dir,
                        const std::optional<AttitudeAngles>& att) {
    // The zero attitude must reproduce the attitude-free path bit for bit,
    // so it skips the rotate/recover round trip.
    const SphericalDirection look = (att && !att->is_zero()) ? rotate_direction(*att, dir) : dir;
    return params.tx_pattern.gain(look) * params.rx_pattern.gain(look);
}

double power_to_dbm(double p_t_dbm, double linear_factor) {
    if (!(linear_factor > 0.0) || !std::isfinite(linear_factor)) return kRssFloorDbm;
    return std::max(p_t_dbm + 10.0 * std::log10(linear_factor), kRssFloorDbm);
}

}  // namespace

double fspl_rss(const PropagationParams& params, const Position& tx, const Position& rx,
                const std::optional<AttitudeAngles>& att) {
    const LinkGeometry g = link_geometry(tx, rx, params.f_c_hz);
    const double gain = ray_gain_product(params, g.los_direction(), att);
    const double amp = params.wavelength() / (4.0 * kPi * g.d_los);
    return power_to_dbm(params.p_t_dbm, gain * amp * amp);
}

std::complex<double> reflection_coefficient(double theta_r, double epsilon_r, Polarization pol) {
    if (theta_r <= 0.0 || theta_r > kPi / 2.0)
        throw NumericError("reflection_coefficient: grazing angle must be in (0, pi/2]");
    if (epsilon_r < 1.0) throw NumericError("reflection_coefficient: epsilon_r must be >= 1");
    const double st = std::sin(theta_r);
    const double ct = std::cos(theta_r);
    const std::complex<double> root = std::sqrt(std::complex<double>(epsilon_r - ct * ct, 0.0));
    if (pol == Polarization::vertical)
        return (epsilon_r * st - root) / (epsilon_r * st + root);
    return (st - root) / (st + root);
}

double two_ray_rss(const PropagationParams& params, const Position& tx, const Position& rx,
                   const std::optional<AttitudeAngles>& att) {
    const LinkGeometry g = link_geometry(tx, rx, params.f_c_hz);
    const double g_los = ray_gain_product(params, g.los_direction(), att);
    const double g_refl = ray_gain_product(params, g.refl_direction(), att);
    const std::complex<double> gamma =
        reflection_coefficient(g.theta_refl, params.epsilon_r, params.polarization);
    const std::complex<double> phase(std::cos(g.delta_phase), -std::sin(g.delta_phase));
    const std::complex<double> amp =
        std::sqrt(g_los) / g.d_los + gamma * std::sqrt(g_refl) * phase / g.d_refl;
    const double lam4pi = params.wavelength() / (4.0 * kPi);
    return power_to_dbm(params.p_t_dbm, lam4pi * lam4pi * std::norm(amp));
}

bool is_shadowed(const SphericalDirection& dir_to_tx, const ShadowModel& shadow) {
    const double theta_deg = rad2deg(dir_to_tx.theta);
    if (std::abs(theta_deg) >= shadow.elevation_threshold_deg) return false;
    double phi_deg = std::fmod(rad2deg(dir_to_tx.phi), 360.0);
    if (phi_deg < 0.0) phi_deg += 360.0;
    for (double leg : shadow.leg_azimuths_deg) {
        double diff = std::fmod(phi_deg - leg, 360.0);
        if (diff < -180.0) diff += 360.0;
        if (diff >= 180.0) diff -= 360.0;
        if (std::abs(diff) <= shadow.angular_spread_deg) return true;
    }
    return false;
}

double shadow_loss(double d_sh, const ShadowModel& shadow) {
    if (d_sh <= 0.0) throw NumericError("shadow_loss: shadowing distance must be positive");
    return 10.0 * shadow.beta * std::log10(d_sh / shadow.d0);
}

double enhanced_two_ray_rss(const PropagationParams& params, const Position& tx,
                            const Position& rx, const AttitudeAngles& att) {
    const LinkGeometry g = link_geometry(tx, rx, params.f_c_hz);
    const double base = two_ray_rss(params, tx, rx, att);

    SphericalDirection test_dir = g.los_direction();
    if (params.shadow.frame == ShadowModel::Frame::body && !att.is_zero())
        test_dir = direction_in_body_frame(att, test_dir);
    if (params.shadow.elevation_from_unrotated_los) test_dir.theta = g.theta_los;

    if (is_shadowed(test_dir, params.shadow)) return base - shadow_loss(g.d_los, params.shadow);
    return base;
}

double fit_beta(const std::vector<double>& measured_dbm,
                const std::vector<double>& simulated_unshadowed_dbm,
                const std::vector<bool>& shadow_flags,
                const std::vector<double>& d_los_m, double d0) {
    const std::size_t n = measured_dbm.size();
    if (simulated_unshadowed_dbm.size() != n || shadow_flags.size() != n || d_los_m.size() != n)
        throw NumericError("fit_beta: traces must have equal length");
    if (d0 <= 0.0) throw NumericError("fit_beta: d0 must be positive");

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!shadow_flags[i]) continue;
        if (d_los_m[i] <= 0.0) throw NumericError("fit_beta: nonpositive distance on shadowed sample");
        const double x = 10.0 * std::log10(d_los_m[i] / d0);
        const double y = simulated_unshadowed_dbm[i] - measured_dbm[i];
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) throw NumericError("fit_beta: need at least 2 shadowed samples");
    const double denom = sxx - sx * sx / static_cast<double>(m);
    if (denom <= 1e-12) throw NumericError("fit_beta: zero variance in log-distance regressor");
    return (sxy - sx * sy / static_cast<double>(m)) / denom;
}

}  // namespace rfsim
