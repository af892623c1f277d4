#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "rfsim/antenna.hpp"
#include "rfsim/geometry.hpp"

namespace rfsim {

inline constexpr double kSpeedOfLight = 299792458.0;

// Floor applied when the received amplitude underflows (e.g. both gains sit
// in an exact pattern null), keeping downstream arithmetic finite.
inline constexpr double kRssFloorDbm = -250.0;

enum class Polarization { vertical, horizontal };

// Geometry of one ground-TX / airborne-RX pair. Angles describe the
// direction from the receiver toward the transmitter (LoS) and toward the
// ground-reflection image (reflected).
struct LinkGeometry {
    double d_2d = 0.0;        // horizontal separation, m
    double d_los = 0.0;       // direct-path length (d3), m
    double d_refl = 0.0;      // reflected-path length (d1 + d2), m
    double theta_los = 0.0;   // LoS elevation at the receiver, rad
    double theta_refl = 0.0;  // reflected-ray elevation angle, rad
    double phi_los = 0.0;     // azimuth of the TX seen from the RX, rad
    double phi_refl = 0.0;    // same azimuth for the reflected ray, rad
    double delta_phase = 0.0; // path-difference phase 2*pi*(d_refl - d_los)/lambda, rad

    SphericalDirection los_direction() const { return {theta_los, phi_los}; }
    SphericalDirection refl_direction() const { return {theta_refl, phi_refl}; }
};

// UAV leg shadowing configuration (Eq. 8/9 parameters).
struct ShadowModel {
    std::vector<double> leg_azimuths_deg = {39.0, 150.0, 270.0};
    double angular_spread_deg = 5.0;       // Delta
    double elevation_threshold_deg = 10.0; // delta
    double beta = 2.0;                     // shadowing exponent
    double d0 = 1.0;                       // reference distance, m
    enum class Frame { body, world };
    Frame frame = Frame::body;
    // When set, the elevation criterion uses the unrotated LoS elevation
    // even though the azimuth test runs in the configured frame.
    bool elevation_from_unrotated_los = false;
};

struct PropagationParams {
    double p_t_dbm = 41.0;
    double f_c_hz = 3.32e9;
    double epsilon_r = 2.0;
    Polarization polarization = Polarization::vertical;
    AntennaPattern tx_pattern = AntennaPattern::dipole();
    AntennaPattern rx_pattern = AntennaPattern::dipole();
    ShadowModel shadow;

    double wavelength() const { return kSpeedOfLight / f_c_hz; }
};

struct Position {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// tx is the ground source (z >= 0), rx the airborne receiver (z > 0).
// Coincident positions are a domain error.
LinkGeometry link_geometry(const Position& tx, const Position& rx, double f_c_hz);

// Free-space RSS in dBm with pattern gains evaluated at the LoS angles
// (optionally attitude-rotated).
double fspl_rss(const PropagationParams& params, const Position& tx, const Position& rx,
                const std::optional<AttitudeAngles>& att = std::nullopt);

// Fresnel ground reflection coefficient at grazing elevation theta_r.
std::complex<double> reflection_coefficient(double theta_r, double epsilon_r, Polarization pol);

// Two-ray RSS (LoS + single ground reflection summed as complex amplitudes),
// in dBm. With an attitude, all four gain lookups use rotated angles.
double two_ray_rss(const PropagationParams& params, const Position& tx, const Position& rx,
                   const std::optional<AttitudeAngles>& att = std::nullopt);

// Leg-shadow indicator on a direction already expressed in the frame the
// model is configured for. Azimuth intervals wrap at 360 degrees; the
// elevation criterion is |theta| < delta.
bool is_shadowed(const SphericalDirection& dir_to_tx, const ShadowModel& shadow);

// Excess loss 10 * beta * log10(d_sh / d0) in dB; d_sh <= 0 is a domain error.
double shadow_loss(double d_sh, const ShadowModel& shadow);

// Two-ray RSS with attitude-rotated gains minus the shadow loss whenever the
// leg-shadow test fires; equals two_ray_rss exactly otherwise.
double enhanced_two_ray_rss(const PropagationParams& params, const Position& tx,
                            const Position& rx, const AttitudeAngles& att);

// Least-squares estimate of the shadowing exponent from measured vs
// simulated-unshadowed traces. Only samples flagged shadowed participate;
// the fit regresses (simulated - measured) on 10*log10(d_los/d0) with an
// intercept and returns the slope.
double fit_beta(const std::vector<double>& measured_dbm,
                const std::vector<double>& simulated_unshadowed_dbm,
                const std::vector<bool>& shadow_flags,
                const std::vector<double>& d_los_m, double d0);

}  // namespace rfsim
