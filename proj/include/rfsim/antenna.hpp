#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rfsim/geometry.hpp"

namespace rfsim {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Half-wave dipole peak gain, used as the default donut-pattern maximum.
inline constexpr double kDipolePeakGain = 1.643;

// Azimuth-symmetric donut pattern: g_max * cos^2(theta), theta measured from
// the horizontal plane.
double dipole_gain(double theta, double g_max = kDipolePeakGain);

// Either the analytic dipole or a gridded pattern tabulated in dBi over an
// elevation x azimuth grid. Gridded lookups interpolate bilinearly in dBi
// (wrapping azimuth across the 360 -> 0 seam, clamping elevation to the grid
// edges) and convert to linear gain afterwards.
class AntennaPattern {
  public:
    static AntennaPattern dipole(double g_max = kDipolePeakGain);
    static AntennaPattern isotropic(double gain_dbi = 0.0);
    static AntennaPattern gridded(std::vector<double> theta_deg, std::vector<double> phi_deg,
                                  std::vector<double> gain_dbi);

    bool is_analytic() const { return analytic_; }
    double peak_gain() const { return g_max_; }
    const std::vector<double>& theta_grid() const { return theta_deg_; }
    const std::vector<double>& phi_grid() const { return phi_deg_; }
    const std::vector<double>& gain_grid() const { return gain_dbi_; }

    // Linear gain toward a direction.
    double gain(const SphericalDirection& dir) const;

  private:
    AntennaPattern() = default;

    double gain_dbi_at(std::size_t ti, std::size_t pi) const {
        return gain_dbi_[ti * phi_deg_.size() + pi];
    }

    bool analytic_ = true;
    double g_max_ = kDipolePeakGain;
    std::vector<double> theta_deg_;  // ascending, within [-90, 90]
    std::vector<double> phi_deg_;    // ascending, within [0, 360)
    std::vector<double> gain_dbi_;   // row-major, theta outer
};

// Reads a pattern CSV with header `theta_deg,phi_deg,gain_dbi`, rows in
// theta-outer row-major order. Throws ParseError with the offending line on
// malformed input, non-rectangular grids, or non-ascending grid axes.
AntennaPattern load_pattern(const std::string& path);

double pattern_gain(const AntennaPattern& p, const SphericalDirection& dir);

}  // namespace rfsim
