// Test-support utility: writes fixture files and synthetic traces consumed
// by the unit tests and the CLI workflow test.
//
//   gen_testdata fixtures <dir>   regenerate the committed format fixtures
//   gen_testdata trace <out.csv>  write a short enhanced-two-ray trace
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "rfsim/harness.hpp"
#include "rfsim/rng.hpp"

using namespace rfsim;

namespace {

int write_fixtures(const std::string& dir) {
    // Dataset fixture: two hand-valued records over a tiny scenario echo.
    Scenario sc;
    sc.duration_s = 1.0;
    sc.dt_s = 0.25;

    DatasetRecord a;
    a.source_x = 100.25;
    a.source_y = 300.5;
    a.rss = {-52.5f, -60.0f, -61.5f, -70.25f};
    a.x = {0.0f, 10.0f, 20.0f, 30.0f};
    a.y = {120.0f, 130.0f, 140.0f, 150.0f};
    DatasetRecord b;
    b.source_x = 40.0;
    b.source_y = 150.75;
    b.rss = {-48.0f, -55.5f, -63.25f, -71.0f};
    b.x = {5.0f, 15.0f, 25.0f, 35.0f};
    b.y = {200.0f, 210.0f, 220.0f, 230.0f};
    save_dataset({a, b}, sc, dir + "/dataset_v1.rfds");

    // Model fixture: a small trained model plus a recorded probe output.
    ModelConfig cfg;
    cfg.input_len = 24;
    cfg.stem_filters = 6;
    cfg.block_filters = {6, 10};
    cfg.mlp_dims = {16, 12, 8, 2};
    ModelParams model = build_model(cfg, 20240615);

    TrainingSet data;
    Rng rng(1);
    for (int i = 0; i < 12; ++i) {
        std::vector<double> row(cfg.input_len);
        for (double& v : row) v = rng.uniform(-80.0, -30.0);
        data.inputs.push_back(row);
        data.labels_m.push_back({rng.uniform(0.0, 200.0), rng.uniform(0.0, 400.0)});
    }
    TrainConfig tc;
    tc.epochs = 5;
    tc.batch_size = 4;
    tc.split = 1.0;
    tc.seed = 2;
    train(model, data, tc);
    save_model(model, dir + "/model_v1.rfm");

    // record the probe through a load so the fixture captures file-precision
    // weights
    const ModelParams loaded = load_model(dir + "/model_v1.rfm");
    std::vector<double> probe(cfg.input_len);
    Rng prng(99);
    for (double& v : probe) v = prng.uniform(-80.0, -30.0);
    const auto out = forward(loaded, probe);

    nlohmann::json expected;
    expected["probe"] = probe;
    expected["x"] = out[0];
    expected["y"] = out[1];
    std::ofstream f(dir + "/model_v1_expected.json");
    f << expected.dump(2) << "\n";
    std::cout << "fixtures written to " << dir << " (probe -> " << out[0] << ", " << out[1]
              << ")\n";
    return 0;
}

int write_trace(const std::string& out) {
    Scenario sc;
    sc.duration_s = 45.0;
    sc.dt_s = 0.05;
    const Scenario scenario = finalize_scenario(sc);
    const FlightLog log = sample_flight(scenario.trajectory, scenario.duration_s, scenario.dt_s,
                                        scenario.jitter_deg, 31337);
    std::vector<double> rss = simulate_rss(scenario, log, 110.0, 280.0);
    Rng rng(424242);
    for (double& v : rss) v += rng.normal(0.0, scenario.noise_std_db);
    save_trace_csv(trace_from_log(log, rss), out);
    std::cout << "trace written to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc >= 3 && std::string(argv[1]) == "fixtures") return write_fixtures(argv[2]);
    if (argc >= 3 && std::string(argv[1]) == "trace") return write_trace(argv[2]);
    std::cerr << "usage: gen_testdata fixtures <dir> | trace <out.csv>\n";
    return 2;
}
