#include "rfsim/flight.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rfsim/errors.hpp"
#include "rfsim/rng.hpp"

namespace rfsim {

double Trajectory::path_length() const {
    double len = 0.0;
    for (std::size_t i = 1; i < waypoints.size(); ++i)
        len += std::hypot(waypoints[i].x - waypoints[i - 1].x,
                          waypoints[i].y - waypoints[i - 1].y);
    if (closed && waypoints.size() > 1)
        len += std::hypot(waypoints.front().x - waypoints.back().x,
                          waypoints.front().y - waypoints.back().y);
    return len;
}

namespace {

void check_region(const Rect& region, double spacing, double altitude) {
    if (region.width() <= 0.0 || region.height() <= 0.0)
        throw ConfigError("trajectory region must have positive extent");
    if (spacing <= 0.0 || spacing > std::min(region.width(), region.height()))
        throw ConfigError("trajectory spacing must be in (0, min(width, height)]");
    if (altitude <= 0.0) throw ConfigError("trajectory altitude must be positive");
}

}  // namespace

Trajectory spiral_trajectory(const Rect& region, double spacing, double altitude) {
    check_region(region, spacing, altitude);

    Trajectory traj;
    traj.altitude = altitude;
    double l = region.x0, r = region.x1, b = region.y0, t = region.y1;
    traj.waypoints.push_back({l, b});
    while (true) {
        traj.waypoints.push_back({r, b});
        traj.waypoints.push_back({r, t});
        traj.waypoints.push_back({l, t});
        if (b + spacing < t) traj.waypoints.push_back({l, b + spacing});
        const double nl = l + spacing, nr = r - spacing;
        const double nb = b + spacing, nt = t - spacing;
        if (nr - nl < spacing || nt - nb < spacing) break;
        l = nl;
        r = nr;
        b = nb;
        t = nt;
    }
    return traj;
}

Trajectory lawnmower_trajectory(const Rect& region, double spacing, double altitude) {
    check_region(region, spacing, altitude);

    Trajectory traj;
    traj.altitude = altitude;
    bool left_to_right = true;
    for (double y = region.y0; y <= region.y1 + 1e-9; y += spacing) {
        const double yy = std::min(y, region.y1);
        if (left_to_right) {
            traj.waypoints.push_back({region.x0, yy});
            traj.waypoints.push_back({region.x1, yy});
        } else {
            traj.waypoints.push_back({region.x1, yy});
            traj.waypoints.push_back({region.x0, yy});
        }
        left_to_right = !left_to_right;
    }
    return traj;
}

Trajectory perimeter_trajectory(const Rect& region, double altitude) {
    if (region.width() <= 0.0 || region.height() <= 0.0)
        throw ConfigError("trajectory region must have positive extent");
    if (altitude <= 0.0) throw ConfigError("trajectory altitude must be positive");
    Trajectory traj;
    traj.altitude = altitude;
    traj.closed = true;
    traj.waypoints = {{region.x0, region.y0},
                      {region.x1, region.y0},
                      {region.x1, region.y1},
                      {region.x0, region.y1}};
    return traj;
}

Trajectory random_waypoint_trajectory(const Rect& region, std::size_t count, double altitude,
                                      std::uint64_t seed) {
    if (count < 2) throw ConfigError("random trajectory needs at least 2 waypoints");
    if (region.width() <= 0.0 || region.height() <= 0.0)
        throw ConfigError("trajectory region must have positive extent");
    if (altitude <= 0.0) throw ConfigError("trajectory altitude must be positive");
    Trajectory traj;
    traj.altitude = altitude;
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        Waypoint w{rng.uniform(region.x0, region.x1), rng.uniform(region.y0, region.y1)};
        if (!traj.waypoints.empty()) {
            const Waypoint& prev = traj.waypoints.back();
            if (w.x == prev.x && w.y == prev.y) continue;
        }
        traj.waypoints.push_back(w);
    }
    return traj;
}

FlightLog sample_flight(const Trajectory& traj, double duration_s, double dt_s,
                        double jitter_deg, std::uint64_t seed) {
    if (duration_s <= 0.0 || dt_s <= 0.0)
        throw ConfigError("sample_flight: duration and dt must be positive");
    if (jitter_deg < 0.0) throw ConfigError("sample_flight: jitter must be >= 0");
    if (traj.waypoints.size() < 2) throw ConfigError("sample_flight: trajectory needs >= 2 waypoints");

    std::vector<Waypoint> pts = traj.waypoints;
    if (traj.closed) pts.push_back(traj.waypoints.front());

    std::vector<double> cumlen(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        cumlen[i] = cumlen[i - 1] + std::hypot(pts[i].x - pts[i - 1].x, pts[i].y - pts[i - 1].y);
    const double total = cumlen.back();
    if (total <= 0.0) throw ConfigError("sample_flight: zero-length path");

    // floor() with a small slack so durations that are exact multiples of dt
    // in real arithmetic (600 / 0.03) keep their full sample count.
    const auto count = static_cast<std::size_t>(std::floor(duration_s / dt_s + 1e-9));
    const double speed = total / duration_s;
    const double jitter_rad = deg2rad(jitter_deg);

    Rng rng(seed);
    FlightLog log;
    log.samples.reserve(count);
    std::size_t seg = 1;
    for (std::size_t s = 0; s < count; ++s) {
        const double t = static_cast<double>(s) * dt_s;
        const double dist = std::min(t * speed, total);
        while (seg + 1 < cumlen.size() && cumlen[seg] < dist) ++seg;
        const double seg_len = cumlen[seg] - cumlen[seg - 1];
        const double f = seg_len > 0.0 ? (dist - cumlen[seg - 1]) / seg_len : 0.0;
        FlightSample fs;
        fs.t = t;
        fs.x = pts[seg - 1].x + f * (pts[seg].x - pts[seg - 1].x);
        fs.y = pts[seg - 1].y + f * (pts[seg].y - pts[seg - 1].y);
        fs.z = traj.altitude;
        if (jitter_rad > 0.0) {
            fs.att.roll = rng.uniform(-jitter_rad, jitter_rad);
            fs.att.pitch = rng.uniform(-jitter_rad, jitter_rad);
            fs.att.yaw = rng.uniform(-jitter_rad, jitter_rad);
        }
        log.samples.push_back(fs);
    }
    return log;
}

void save_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write trajectory file: " + path);
    out << "x_m,y_m\n";
    out.precision(17);
    for (const auto& w : traj.waypoints) out << w.x << "," << w.y << "\n";
}

Trajectory load_trajectory_csv(const std::string& path, double altitude) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trajectory file: " + path);
    Trajectory traj;
    traj.altitude = altitude;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path, 1, "empty trajectory file");
    ++lineno;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string xs, ys;
        if (!std::getline(ss, xs, ',') || !std::getline(ss, ys))
            throw ParseError(path, lineno, "expected x_m,y_m");
        try {
            traj.waypoints.push_back({std::stod(xs), std::stod(ys)});
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "non-numeric waypoint");
        }
    }
    if (traj.waypoints.size() < 2) throw ParseError(path, lineno, "trajectory needs >= 2 waypoints");
    return traj;
}

void save_flight_csv(const FlightLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write flight log: " + path);
    out << "t_s,x_m,y_m,z_m,roll_deg,pitch_deg,yaw_deg\n";
    out.precision(17);
    for (const auto& s : log.samples)
        out << s.t << "," << s.x << "," << s.y << "," << s.z << "," << rad2deg(s.att.roll) << ","
            << rad2deg(s.att.pitch) << "," << rad2deg(s.att.yaw) << "\n";
}

}  // namespace rfsim
