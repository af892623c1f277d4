#include "rfsim/antenna.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rfsim/errors.hpp"

namespace rfsim {

double dipole_gain(double theta, double g_max) {
    const double c = std::cos(theta);
    return g_max * c * c;
}

AntennaPattern AntennaPattern::dipole(double g_max) {
    AntennaPattern p;
    p.analytic_ = true;
    p.g_max_ = g_max;
    return p;
}

AntennaPattern AntennaPattern::isotropic(double gain_dbi) {
    return gridded({-90.0, 90.0}, {0.0, 180.0}, {gain_dbi, gain_dbi, gain_dbi, gain_dbi});
}

AntennaPattern AntennaPattern::gridded(std::vector<double> theta_deg, std::vector<double> phi_deg,
                                       std::vector<double> gain_dbi) {
    if (theta_deg.size() < 2 || phi_deg.size() < 2)
        throw DataError("antenna grid needs at least 2 nodes per axis");
    if (gain_dbi.size() != theta_deg.size() * phi_deg.size())
        throw DataError("antenna gain matrix does not match grid dimensions");
    auto strictly_ascending = [](const std::vector<double>& v) {
        return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
    };
    if (!strictly_ascending(theta_deg) || !strictly_ascending(phi_deg))
        throw DataError("antenna grid axes must be strictly ascending");
    if (theta_deg.front() < -90.0 || theta_deg.back() > 90.0)
        throw DataError("theta grid must lie within [-90, 90] degrees");
    if (phi_deg.front() < 0.0 || phi_deg.back() >= 360.0)
        throw DataError("phi grid must lie within [0, 360) degrees");
    for (double g : gain_dbi)
        if (!std::isfinite(g)) throw DataError("antenna gains must be finite");
    AntennaPattern p;
    p.analytic_ = false;
    p.theta_deg_ = std::move(theta_deg);
    p.phi_deg_ = std::move(phi_deg);
    p.gain_dbi_ = std::move(gain_dbi);
    return p;
}

namespace {

// Index of the last grid node <= value, clamped to [0, n-2] so that
// [i, i+1] always brackets.
std::size_t lower_cell(const std::vector<double>& grid, double value) {
    auto it = std::upper_bound(grid.begin(), grid.end(), value);
    if (it == grid.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
    return std::min(i, grid.size() - 2);
}

}  // namespace

double AntennaPattern::gain(const SphericalDirection& dir) const {
    if (analytic_) return dipole_gain(dir.theta, g_max_);

    const double theta = std::clamp(rad2deg(dir.theta), theta_deg_.front(), theta_deg_.back());
    double phi = std::fmod(rad2deg(dir.phi), 360.0);
    if (phi < 0.0) phi += 360.0;

    const std::size_t ti = lower_cell(theta_deg_, theta);
    const double t0 = theta_deg_[ti], t1 = theta_deg_[ti + 1];
    const double ft = (t1 == t0) ? 0.0 : (theta - t0) / (t1 - t0);

    // Azimuth is periodic: below the first node or beyond the last one the
    // bracketing cell is [last, first + 360).
    std::size_t p0, p1;
    double fp;
    const std::size_t np = phi_deg_.size();
    if (phi < phi_deg_.front() || phi >= phi_deg_.back()) {
        p0 = np - 1;
        p1 = 0;
        const double span = phi_deg_.front() + 360.0 - phi_deg_.back();
        double offset = phi - phi_deg_.back();
        if (offset < 0.0) offset += 360.0;
        fp = (span == 0.0) ? 0.0 : offset / span;
    } else {
        p0 = lower_cell(phi_deg_, phi);
        p1 = p0 + 1;
        const double a = phi_deg_[p0], b = phi_deg_[p1];
        fp = (b == a) ? 0.0 : (phi - a) / (b - a);
    }

    const double g00 = gain_dbi_at(ti, p0), g01 = gain_dbi_at(ti, p1);
    const double g10 = gain_dbi_at(ti + 1, p0), g11 = gain_dbi_at(ti + 1, p1);
    const double dbi = (1.0 - ft) * ((1.0 - fp) * g00 + fp * g01) +
                       ft * ((1.0 - fp) * g10 + fp * g11);
    return db_to_linear(dbi);
}

AntennaPattern load_pattern(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open antenna pattern file: " + path);

    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path, 1, "empty pattern file");
    ++lineno;
    // Tolerate a UTF-8 BOM and surrounding whitespace in the header.
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    std::string header = line;
    header.erase(std::remove_if(header.begin(), header.end(), ::isspace), header.end());
    if (header != "theta_deg,phi_deg,gain_dbi")
        throw ParseError(path, lineno, "expected header theta_deg,phi_deg,gain_dbi");

    std::vector<double> thetas, phis, gains;
    std::vector<double> phi_first_row;
    std::size_t phi_count = 0;
    double current_theta = 0.0;
    bool have_theta = false;
    std::size_t col = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string ts, ps, gs;
        if (!std::getline(ss, ts, ',') || !std::getline(ss, ps, ',') || !std::getline(ss, gs))
            throw ParseError(path, lineno, "expected 3 comma-separated fields");
        double t, p, g;
        try {
            t = std::stod(ts);
            p = std::stod(ps);
            g = std::stod(gs);
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "non-numeric field");
        }
        if (!have_theta || t != current_theta) {
            if (have_theta) {
                if (phi_count == 0) phi_count = col;
                if (col != phi_count)
                    throw ParseError(path, lineno, "non-rectangular grid: theta row length changed");
                if (t <= current_theta)
                    throw ParseError(path, lineno, "theta rows must be strictly ascending");
            }
            current_theta = t;
            have_theta = true;
            thetas.push_back(t);
            col = 0;
        }
        if (thetas.size() == 1) {
            phi_first_row.push_back(p);
        } else if (col >= phi_first_row.size() || phi_first_row[col] != p) {
            throw ParseError(path, lineno, "non-rectangular grid: phi column mismatch");
        }
        gains.push_back(g);
        ++col;
    }
    if (thetas.empty()) throw ParseError(path, lineno, "pattern file has no data rows");
    if (phi_count == 0) phi_count = col;
    if (col != phi_count) throw ParseError(path, lineno, "non-rectangular grid: truncated last row");

    try {
        return AntennaPattern::gridded(std::move(thetas), std::move(phi_first_row), std::move(gains));
    } catch (const DataError& e) {
        throw ParseError(path, lineno, e.what());
    }
}

double pattern_gain(const AntennaPattern& p, const SphericalDirection& dir) {
    return p.gain(dir);
}

}  // namespace rfsim
