#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "rfsim/errors.hpp"
#include "rfsim/rng.hpp"
#include "rfsim/scenario.hpp"

using namespace rfsim;

namespace {

Scenario small_scenario() {
    Scenario sc;
    sc.duration_s = 30.0;
    sc.dt_s = 0.1;
    sc.spacing = 40.0;
    sc.noise_std_db = 1.0;
    sc.model = PropagationModel::enhanced_two_ray;
    return sc;
}

std::vector<unsigned char> read_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::vector<unsigned char>((std::istreambuf_iterator<char>(in)),
                                      std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("dataset generation shapes and determinism") {
    const Scenario sc = small_scenario();
    const auto a = generate_dataset(sc, 4, 42);
    REQUIRE(a.size() == 4);
    for (const auto& rec : a) {
        CHECK(rec.rss.size() == 300);
        CHECK(rec.x.size() == 300);
        CHECK(rec.y.size() == 300);
        CHECK(sc.source_region.contains(rec.source_x, rec.source_y));
    }
    const auto b = generate_dataset(sc, 4, 42);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a[i].source_x == b[i].source_x);
        CHECK(a[i].rss == b[i].rss);
    }
    // a different seed moves the sources
    const auto c = generate_dataset(sc, 4, 43);
    CHECK(a[0].source_x != c[0].source_x);
}

TEST_CASE("parallel generation matches serial generation exactly") {
    const Scenario sc = small_scenario();
    const auto serial = generate_dataset(sc, 6, 7, 1);
    const auto parallel = generate_dataset(sc, 6, 7, 8);
    REQUIRE(serial.size() == parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        CHECK(serial[i].source_x == parallel[i].source_x);
        CHECK(serial[i].source_y == parallel[i].source_y);
        CHECK(serial[i].rss == parallel[i].rss);
        CHECK(serial[i].x == parallel[i].x);
    }
}

TEST_CASE("noiseless fspl peaks at the flight sample nearest the source") {
    Scenario sc = small_scenario();
    sc.noise_std_db = 0.0;
    sc.jitter_deg = 0.0;
    sc.model = PropagationModel::fspl;
    sc.propagation.tx_pattern = AntennaPattern::isotropic(0.0);
    sc.propagation.rx_pattern = AntennaPattern::isotropic(0.0);
    const auto records = generate_dataset(sc, 5, 11);
    for (const auto& rec : records) {
        std::size_t argmax = 0, argmin_d = 0;
        double best_d = 1e300;
        for (std::size_t i = 0; i < rec.rss.size(); ++i) {
            if (rec.rss[i] > rec.rss[argmax]) argmax = i;
            const double dx = rec.x[i] - rec.source_x, dy = rec.y[i] - rec.source_y;
            const double d = dx * dx + dy * dy;
            if (d < best_d) {
                best_d = d;
                argmin_d = i;
            }
        }
        CHECK(argmax == argmin_d);
    }
}

TEST_CASE("source placements are uniform over the region") {
    Scenario sc = small_scenario();
    // Only the placement draw matters; keep the flights as small as possible.
    sc.duration_s = 1.0;
    sc.dt_s = 1.0;
    const auto records = generate_dataset(sc, 10000, 3);
    double mx = 0.0, my = 0.0;
    for (const auto& rec : records) {
        mx += rec.source_x;
        my += rec.source_y;
    }
    mx /= 10000.0;
    my /= 10000.0;
    // 3 sigma of the mean of U(a,b): 3 * range / sqrt(12 * n)
    const double sx = 3.0 * sc.source_region.width() / std::sqrt(12.0 * 10000.0);
    const double sy = 3.0 * sc.source_region.height() / std::sqrt(12.0 * 10000.0);
    CHECK(std::abs(mx - sc.source_region.cx()) < sx);
    CHECK(std::abs(my - sc.source_region.cy()) < sy);
}

TEST_CASE("noiseless fspl never exceeds the transmit power") {
    Scenario sc = small_scenario();
    sc.noise_std_db = 0.0;
    sc.model = PropagationModel::fspl;
    const auto records = generate_dataset(sc, 3, 5);
    for (const auto& rec : records)
        for (float v : rec.rss) CHECK(v <= sc.propagation.p_t_dbm);
}

TEST_CASE("dataset container round trip") {
    const Scenario sc = small_scenario();
    const auto records = generate_dataset(sc, 3, 2024);
    const std::string path = "/tmp/rfsim_test_dataset.rfds";
    save_dataset(records, sc, path);

    Scenario loaded_sc;
    const auto loaded = load_dataset(path, &loaded_sc);
    REQUIRE(loaded.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(loaded[i].source_x == records[i].source_x);
        CHECK(loaded[i].source_y == records[i].source_y);
        CHECK(loaded[i].rss == records[i].rss);
        CHECK(loaded[i].x == records[i].x);
        CHECK(loaded[i].y == records[i].y);
    }
    CHECK(loaded_sc.duration_s == sc.duration_s);
    CHECK(loaded_sc.model == sc.model);

    // byte-identical when regenerated from the same seed
    const std::string path2 = "/tmp/rfsim_test_dataset2.rfds";
    save_dataset(generate_dataset(sc, 3, 2024), sc, path2);
    CHECK(read_bytes(path) == read_bytes(path2));
    std::remove(path2.c_str());

    SUBCASE("corrupted payload is a structured error") {
        auto bytes = read_bytes(path);
        bytes[bytes.size() - 3] ^= 0x40;
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_dataset(path), DataError);
    }
    SUBCASE("truncated file is a structured error") {
        auto bytes = read_bytes(path);
        bytes.resize(bytes.size() / 2);
        std::ofstream out(path, std::ios::binary);
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        out.close();
        CHECK_THROWS_AS(load_dataset(path), DataError);
    }
    SUBCASE("bad magic is rejected") {
        std::ofstream out(path, std::ios::binary);
        out << "not a dataset";
        out.close();
        CHECK_THROWS_AS(load_dataset(path), DataError);
    }
    std::remove(path.c_str());
}

TEST_CASE("v1 fixture file stays loadable") {
    // Committed fixture: 2 records of 4 samples, written by the v1 writer.
    const auto records = load_dataset(std::string(RFSIM_TEST_DATA_DIR) + "/dataset_v1.rfds");
    REQUIRE(records.size() == 2);
    REQUIRE(records[0].rss.size() == 4);
    CHECK(records[0].source_x == doctest::Approx(100.25));
    CHECK(records[0].source_y == doctest::Approx(300.5));
    CHECK(records[0].rss[0] == doctest::Approx(-52.5f));
    CHECK(records[1].rss[3] == doctest::Approx(-71.0f));
}

TEST_CASE("scenario json parsing and env overrides") {
    const std::string text = R"({
        "duration_s": 120.0,
        "dt_s": 0.06,
        "model": "two_ray",
        "propagation": {"p_t_dbm": 30.0, "epsilon_r": 3.0,
                         "shadow": {"beta": 2.5, "frame": "world"}},
        "preprocess": {"group_size": 4},
        "cluster": {"n_clusters": 10, "seed": 5}
    })";
    const Scenario sc = scenario_from_json_text(text);
    CHECK(sc.duration_s == 120.0);
    CHECK(sc.model == PropagationModel::two_ray);
    CHECK(sc.propagation.p_t_dbm == 30.0);
    CHECK(sc.propagation.epsilon_r == 3.0);
    CHECK(sc.propagation.shadow.beta == 2.5);
    CHECK(sc.propagation.shadow.frame == ShadowModel::Frame::world);
    CHECK(sc.preprocess.group_size == 4);
    CHECK(sc.cluster.n_clusters == 10);

    SUBCASE("environment variables override config keys") {
        setenv("RFSIM_DURATION_S", "240.0", 1);
        setenv("RFSIM_PROPAGATION__P_T_DBM", "35.5", 1);
        setenv("RFSIM_CLUSTER__N_CLUSTERS", "15", 1);
        const Scenario o = scenario_from_json_text(text, true);
        unsetenv("RFSIM_DURATION_S");
        unsetenv("RFSIM_PROPAGATION__P_T_DBM");
        unsetenv("RFSIM_CLUSTER__N_CLUSTERS");
        CHECK(o.duration_s == 240.0);
        CHECK(o.propagation.p_t_dbm == 35.5);
        CHECK(o.cluster.n_clusters == 15);
    }

    SUBCASE("round trip through the serializer") {
        const Scenario back = scenario_from_json_text(scenario_to_json_text(sc));
        CHECK(back.duration_s == sc.duration_s);
        CHECK(back.model == sc.model);
        CHECK(back.propagation.epsilon_r == sc.propagation.epsilon_r);
        CHECK(back.propagation.shadow.beta == sc.propagation.shadow.beta);
    }

    SUBCASE("a trajectory csv replaces the generated spiral") {
        const std::string traj_path = "/tmp/rfsim_test_sc_traj.csv";
        {
            std::ofstream out(traj_path);
            out << "x_m,y_m\n10,130\n210,130\n210,390\n";
        }
        const Scenario o = scenario_from_json_text(
            std::string(R"({"trajectory_csv": ")") + traj_path + R"("})");
        REQUIRE(o.trajectory.waypoints.size() == 3);
        CHECK(o.trajectory.waypoints[1].x == 210.0);
        const Scenario fin = finalize_scenario(o);
        CHECK(fin.trajectory.waypoints.size() == 3);
        std::remove(traj_path.c_str());
    }

    SUBCASE("bad config is a config error") {
        CHECK_THROWS_AS(scenario_from_json_text("{nope"), ConfigError);
        CHECK_THROWS_AS(scenario_from_json_text(R"({"model": "psychic"})"), ConfigError);
        CHECK_THROWS_AS(scenario_from_json_text(R"({"source_height": -2.0})"), ConfigError);
    }
}
