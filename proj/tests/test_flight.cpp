#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "rfsim/errors.hpp"
#include "rfsim/flight.hpp"

using namespace rfsim;

namespace {

std::vector<std::array<double, 2>> as_points(const Trajectory& t) {
    std::vector<std::array<double, 2>> pts;
    for (const auto& w : t.waypoints) pts.push_back({w.x, w.y});
    return pts;
}

}  // namespace

TEST_CASE("spiral with wide spacing degenerates to one perimeter loop") {
    const Trajectory t = spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 60.0, 30.0);
    REQUIRE(t.waypoints.size() >= 4);
    // first four waypoints trace the region perimeter
    CHECK(t.waypoints[0].x == 0.0);
    CHECK(t.waypoints[0].y == 0.0);
    CHECK(t.waypoints[1].x == 100.0);
    CHECK(t.waypoints[2].y == 100.0);
    CHECK(t.waypoints[3].x == 0.0);
    // no second loop: everything stays on the perimeter rectangle edges
    for (const auto& w : t.waypoints) {
        const bool on_edge = w.x == 0.0 || w.x == 100.0 || w.y == 0.0 || w.y == 100.0;
        CHECK(on_edge);
    }
}

TEST_CASE("spiral with two loops stays in bounds and never crosses itself") {
    const Trajectory t = spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 25.0, 30.0);
    const auto pts = as_points(t);
    // two full loops: inner loop corners at the 25 m inset
    bool saw_inner = false;
    for (const auto& w : t.waypoints) {
        CHECK(w.x >= 0.0);
        CHECK(w.x <= 100.0);
        CHECK(w.y >= 0.0);
        CHECK(w.y <= 100.0);
        if (w.x == 75.0 && w.y == 75.0) saw_inner = true;
    }
    CHECK(saw_inner);
    CHECK(oracle::polyline_self_intersections(pts) == 0);
    // consecutive waypoints distinct
    for (std::size_t i = 1; i < t.waypoints.size(); ++i) {
        const bool distinct = t.waypoints[i].x != t.waypoints[i - 1].x ||
                              t.waypoints[i].y != t.waypoints[i - 1].y;
        CHECK(distinct);
    }
}

TEST_CASE("first loop of a rectangular spiral hits the region corners") {
    const Trajectory t = spiral_trajectory({0.0, 200.0, 0.0, 100.0}, 25.0, 30.0);
    double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
    for (const auto& w : t.waypoints) {
        min_x = std::min(min_x, w.x);
        max_x = std::max(max_x, w.x);
        min_y = std::min(min_y, w.y);
        max_y = std::max(max_y, w.y);
    }
    CHECK(min_x == 0.0);
    CHECK(max_x == 200.0);
    CHECK(min_y == 0.0);
    CHECK(max_y == 100.0);
}

TEST_CASE("spiral parameter validation") {
    CHECK_THROWS_AS(spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 0.0, 30.0), ConfigError);
    CHECK_THROWS_AS(spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 120.0, 30.0), ConfigError);
    CHECK_THROWS_AS(spiral_trajectory({0.0, 0.0, 0.0, 100.0}, 10.0, 30.0), ConfigError);
}

TEST_CASE("flight sampling hits the paper sample count") {
    const Trajectory t = spiral_trajectory({0.0, 220.0, 120.0, 400.0}, 40.0, 30.0);
    const FlightLog log = sample_flight(t, 600.0, 0.03, 0.0, 1);
    CHECK(log.samples.size() == 20000);
}

TEST_CASE("zero jitter means exactly zero attitude") {
    const Trajectory t = spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 25.0, 30.0);
    const FlightLog log = sample_flight(t, 60.0, 0.1, 0.0, 42);
    for (const auto& s : log.samples) {
        CHECK(s.att.roll == 0.0);
        CHECK(s.att.pitch == 0.0);
        CHECK(s.att.yaw == 0.0);
        CHECK(s.z == 30.0);
    }
}

TEST_CASE("sampled positions lie on the polyline") {
    const Trajectory t = spiral_trajectory({0.0, 150.0, 0.0, 90.0}, 30.0, 25.0);
    const auto pts = as_points(t);
    const FlightLog log = sample_flight(t, 120.0, 0.25, 5.0, 7);
    for (const auto& s : log.samples)
        CHECK(oracle::distance_to_polyline(s.x, s.y, pts) < 1e-9);
}

TEST_CASE("same seed reproduces the flight bit for bit") {
    const Trajectory t = spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 25.0, 30.0);
    const FlightLog a = sample_flight(t, 60.0, 0.03, 5.0, 123);
    const FlightLog b = sample_flight(t, 60.0, 0.03, 5.0, 123);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].x == b.samples[i].x);
        CHECK(a.samples[i].y == b.samples[i].y);
        CHECK(a.samples[i].att.roll == b.samples[i].att.roll);
        CHECK(a.samples[i].att.pitch == b.samples[i].att.pitch);
        CHECK(a.samples[i].att.yaw == b.samples[i].att.yaw);
    }
}

TEST_CASE("constant arc length between consecutive samples") {
    const Trajectory t = spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 25.0, 30.0);
    const double duration = 60.0, dt = 0.05;
    const FlightLog log = sample_flight(t, duration, dt, 0.0, 1);
    const double speed = t.path_length() / duration;
    // Steps that do not straddle a waypoint have length exactly speed * dt;
    // across corners the straight-line step is shorter, never longer.
    std::size_t exact = 0;
    for (std::size_t i = 1; i < log.samples.size(); ++i) {
        const double step = std::hypot(log.samples[i].x - log.samples[i - 1].x,
                                       log.samples[i].y - log.samples[i - 1].y);
        CHECK(step <= speed * dt + 1e-9);
        if (std::abs(step - speed * dt) < 1e-9) ++exact;
    }
    CHECK(exact > log.samples.size() * 9 / 10);
}

TEST_CASE("attitude jitter is bounded and roughly centered") {
    const Trajectory t = spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 25.0, 30.0);
    const double jitter = 5.0;
    const FlightLog log = sample_flight(t, 600.0, 0.03, jitter, 99);
    REQUIRE(log.samples.size() == 20000);
    double sum_r = 0.0, sum_p = 0.0, sum_y = 0.0;
    for (const auto& s : log.samples) {
        CHECK(std::abs(rad2deg(s.att.roll)) <= jitter);
        CHECK(std::abs(rad2deg(s.att.pitch)) <= jitter);
        CHECK(std::abs(rad2deg(s.att.yaw)) <= jitter);
        sum_r += rad2deg(s.att.roll);
        sum_p += rad2deg(s.att.pitch);
        sum_y += rad2deg(s.att.yaw);
    }
    // mean of U(-5,5) over n draws: sigma = jitter/sqrt(3)/sqrt(n)
    const double n = static_cast<double>(log.samples.size());
    const double three_sigma = 3.0 * jitter / std::sqrt(3.0) / std::sqrt(n);
    CHECK(std::abs(sum_r / n) < three_sigma);
    CHECK(std::abs(sum_p / n) < three_sigma);
    CHECK(std::abs(sum_y / n) < three_sigma);
}

TEST_CASE("lawnmower and random trajectories are usable alternates") {
    const Rect region{0.0, 220.0, 120.0, 400.0};
    const Trajectory mower = lawnmower_trajectory(region, 40.0, 30.0);
    CHECK(mower.waypoints.size() >= 4);
    CHECK(oracle::polyline_self_intersections(as_points(mower)) == 0);

    const Trajectory rnd = random_waypoint_trajectory(region, 12, 30.0, 5);
    CHECK(rnd.waypoints.size() >= 2);
    for (const auto& w : rnd.waypoints) CHECK(region.contains(w.x, w.y));

    const Trajectory ring = perimeter_trajectory(region, 30.0);
    CHECK(ring.closed);
    CHECK(ring.path_length() == doctest::Approx(2.0 * (220.0 + 280.0)));
}

TEST_CASE("flight log export format") {
    const Trajectory t = spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 25.0, 30.0);
    const FlightLog log = sample_flight(t, 5.0, 0.5, 3.0, 4);
    const std::string path = "/tmp/rfsim_test_flightlog.csv";
    save_flight_csv(log, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "t_s,x_m,y_m,z_m,roll_deg,pitch_deg,yaw_deg");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == log.samples.size());
    std::remove(path.c_str());
}

TEST_CASE("trajectory csv round trip") {
    const Trajectory t = spiral_trajectory({0.0, 100.0, 0.0, 100.0}, 25.0, 30.0);
    const std::string path = "/tmp/rfsim_test_traj.csv";
    save_trajectory_csv(t, path);
    const Trajectory back = load_trajectory_csv(path, t.altitude);
    REQUIRE(back.waypoints.size() == t.waypoints.size());
    for (std::size_t i = 0; i < t.waypoints.size(); ++i) {
        CHECK(back.waypoints[i].x == t.waypoints[i].x);
        CHECK(back.waypoints[i].y == t.waypoints[i].y);
    }
    std::remove(path.c_str());
}
