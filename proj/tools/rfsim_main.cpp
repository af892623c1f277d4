// rfsim: simulate UAV-collected RSS under free-space / two-ray / enhanced
// two-ray models and localize ground RF sources from flight RSS.
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfsim/errors.hpp"
#include "rfsim/harness.hpp"
#include "rfsim/parallel.hpp"
#include "rfsim/rng.hpp"

using nlohmann::json;
using namespace rfsim;

namespace {

Scenario scenario_or_default(const std::string& path) {
    if (path.empty()) return finalize_scenario(Scenario{});
    return finalize_scenario(load_scenario(path));
}

void write_json(const json& j, const std::string& path) {
    if (path.empty()) return;
    std::ofstream out(path);
    if (!out) throw DataError("cannot write output file: " + path);
    out << j.dump(2) << "\n";
}

std::array<double, 2> parse_xy(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ConfigError("expected x,y but got: " + text);
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        throw ConfigError("expected numeric x,y but got: " + text);
    }
}

std::vector<double> trace_inputs_for_model(const ModelParams& model, const MeasuredTrace& trace,
                                           const Scenario& sc, std::uint64_t seed) {
    std::vector<double> x, y, rss;
    x.reserve(trace.samples.size());
    for (const TraceSample& s : trace.samples) {
        x.push_back(s.x);
        y.push_back(s.y);
        rss.push_back(s.rss_dbm);
    }
    if (model.config.variant == ModelVariant::clustering) {
        ClusterConfig cluster = sc.cluster;
        cluster.seed = seed;
        return extract_features(x, y, rss, sc.preprocess, cluster).values;
    }
    return normalized_input(rss, sc.preprocess);
}

int cmd_simulate(const std::string& scenario_path, std::size_t records, std::uint64_t seed,
                 const std::string& out) {
    const Scenario sc = scenario_or_default(scenario_path);
    const auto dataset = generate_dataset(sc, records, seed, default_workers());
    save_dataset(dataset, sc, out);
    std::cout << "wrote " << dataset.size() << " records ("
              << (dataset.empty() ? 0 : dataset.front().rss.size()) << " samples each) to " << out
              << "\n";
    return 0;
}

int cmd_features(const std::string& in, const std::string& scenario_path, std::uint64_t seed,
                 const std::string& out) {
    Scenario sc;
    const auto records = load_dataset(in, &sc);
    if (!scenario_path.empty()) sc = finalize_scenario(load_scenario(scenario_path));

    std::vector<std::vector<double>> rows(records.size());
    parallel_for(records.size(), default_workers(), [&](std::size_t i) {
        ClusterConfig cluster = sc.cluster;
        cluster.seed = mix_seed(seed, i);
        rows[i] = record_features(records[i], sc.preprocess, cluster);
    });

    std::ofstream f(out);
    if (!f) throw DataError("cannot write feature dump: " + out);
    f << "src_x,src_y";
    for (std::size_t i = 0; i < rows.front().size(); ++i) f << ",f_" << i;
    f << "\n";
    f.precision(12);
    for (std::size_t i = 0; i < records.size(); ++i) {
        f << records[i].source_x << "," << records[i].source_y;
        for (double v : rows[i]) f << "," << v;
        f << "\n";
    }
    std::cout << "wrote " << records.size() << " feature rows to " << out << "\n";
    return 0;
}

int cmd_train(const std::string& in, const std::string& variant, const std::string& scenario_path,
              const TrainConfig& tc, const std::string& out, const std::string& loss_curve) {
    Scenario sc;
    const auto records = load_dataset(in, &sc);
    if (!scenario_path.empty()) sc = finalize_scenario(load_scenario(scenario_path));

    TrainingSet data;
    data.inputs.resize(records.size());
    data.labels_m.resize(records.size());
    const bool clustering = variant == "clustering";
    parallel_for(records.size(), default_workers(), [&](std::size_t i) {
        if (clustering) {
            ClusterConfig cluster = sc.cluster;
            cluster.seed = mix_seed(tc.seed, i);
            data.inputs[i] = record_features(records[i], sc.preprocess, cluster);
        } else {
            data.inputs[i] = record_normalized_input(records[i], sc.preprocess);
        }
        data.labels_m[i] = {records[i].source_x, records[i].source_y};
    });

    ModelConfig cfg = clustering
                          ? ModelConfig::clustering_default(sc.cluster.n_clusters)
                          : ModelConfig::normalized_default(data.inputs.front().size());
    ModelParams model = build_model(cfg, tc.seed);
    const TrainResult result = train(model, data, tc);
    save_model(model, out);
    if (!loss_curve.empty()) save_loss_curve_csv(result, loss_curve);
    std::cout << "trained " << variant << " model on " << records.size() << " records; final train loss "
              << result.train_loss_m2.back() << " m^2";
    if (std::isfinite(result.val_loss_m2.back()))
        std::cout << ", val loss " << result.val_loss_m2.back() << " m^2";
    std::cout << "; saved to " << out << "\n";
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& trace_path,
                const std::string& scenario_path, std::uint64_t seed, const std::string& out) {
    const ModelParams model = load_model(model_path);
    const MeasuredTrace trace = load_trace_csv(trace_path);
    const Scenario sc = scenario_or_default(scenario_path);
    const auto input = trace_inputs_for_model(model, trace, sc, seed);
    const auto est = forward(model, input);
    std::cout << "estimate: x = " << est[0] << " m, y = " << est[1] << " m\n";
    write_json(json{{"x_m", est[0]}, {"y_m", est[1]}}, out);
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& in,
             const std::string& scenario_path, const std::string& out) {
    const ModelParams model = load_model(model_path);
    Scenario sc;
    const auto records = load_dataset(in, &sc);
    if (!scenario_path.empty()) sc = finalize_scenario(load_scenario(scenario_path));
    const EvalReport report = evaluate_localizer(model, records, sc.preprocess, sc.cluster,
                                                 default_workers());
    json trials = json::array();
    for (const EvalTrial& t : report.trials)
        trials.push_back(json{{"truth_x", t.truth_x},
                              {"truth_y", t.truth_y},
                              {"est_x", t.est_x},
                              {"est_y", t.est_y},
                              {"error_m", t.error_m}});
    const json j{{"mean_error_m", report.mean_error_m}, {"trials", trials}};
    std::cout << "mean 2D error over " << report.trials.size() << " trials: " << report.mean_error_m
              << " m\n";
    write_json(j, out);
    return 0;
}

int cmd_compare_models(const std::string& trace_path, const std::string& scenario_path,
                       const std::string& source, const std::string& out_prefix) {
    const Scenario sc = scenario_or_default(scenario_path);
    const MeasuredTrace trace = load_trace_csv(trace_path);
    const auto src = parse_xy(source);
    const std::array<std::pair<const char*, PropagationModel>, 3> models{
        {{"fspl", PropagationModel::fspl},
         {"two_ray", PropagationModel::two_ray},
         {"enhanced_two_ray", PropagationModel::enhanced_two_ray}}};
    for (const auto& [name, model] : models) {
        const auto cdf = rss_abs_error_cdf(trace, sc, src[0], src[1], model);
        if (!out_prefix.empty()) save_cdf_csv(cdf, out_prefix + "_" + name + ".csv");
        std::cout << name << ": median abs error " << cdf[cdf.size() / 2].value << " dB, p90 "
                  << cdf[(cdf.size() * 9) / 10].value << " dB\n";
    }
    return 0;
}

int cmd_fit_beta(const std::string& trace_path, const std::string& scenario_path,
                 const std::string& source, const std::string& out) {
    const Scenario sc = scenario_or_default(scenario_path);
    const MeasuredTrace trace = load_trace_csv(trace_path);
    const auto src = parse_xy(source);
    const Position tx{src[0], src[1], sc.source_height};

    std::vector<double> measured, simulated, d_los;
    std::vector<bool> flags;
    for (const TraceSample& s : trace.samples) {
        const Position rx{s.x, s.y, s.z};
        const AttitudeAngles att = s.has_attitude ? s.att : AttitudeAngles{};
        const LinkGeometry g = link_geometry(tx, rx, sc.propagation.f_c_hz);
        SphericalDirection dir = g.los_direction();
        if (sc.propagation.shadow.frame == ShadowModel::Frame::body && !att.is_zero())
            dir = direction_in_body_frame(att, dir);
        if (sc.propagation.shadow.elevation_from_unrotated_los) dir.theta = g.theta_los;
        measured.push_back(s.rss_dbm);
        simulated.push_back(two_ray_rss(sc.propagation, tx, rx, att));
        d_los.push_back(g.d_los);
        flags.push_back(is_shadowed(dir, sc.propagation.shadow));
    }
    const double beta = fit_beta(measured, simulated, flags, d_los, sc.propagation.shadow.d0);
    const std::size_t used = static_cast<std::size_t>(std::count(flags.begin(), flags.end(), true));
    std::cout << "beta = " << beta << " (fit on " << used << " shadowed samples)\n";
    write_json(json{{"beta", beta}, {"shadowed_samples", used}}, out);
    return 0;
}

int cmd_complexity(const std::string& scenario_path, const std::string& out) {
    const Scenario sc = scenario_or_default(scenario_path);
    const ModelConfig clustering = ModelConfig::clustering_default(sc.cluster.n_clusters);

    // The normalized variant consumes one grouped flight trace.
    const auto samples =
        static_cast<std::size_t>(std::floor(sc.duration_s / sc.dt_s + 1e-9));
    const std::size_t grouped =
        (samples + sc.preprocess.group_size - 1) / sc.preprocess.group_size;
    const ModelConfig normalized = ModelConfig::normalized_default(grouped);

    const ComplexityReport rc = count_complexity(clustering);
    const ComplexityReport rn = count_complexity(normalized);
    const json j{
        {"clustering", {{"parameters", rc.parameter_count}, {"flops", rc.flop_count}}},
        {"normalized", {{"parameters", rn.parameter_count}, {"flops", rn.flop_count}}},
        {"parameter_ratio",
         static_cast<double>(rn.parameter_count) / static_cast<double>(rc.parameter_count)},
        {"flop_ratio", static_cast<double>(rn.flop_count) / static_cast<double>(rc.flop_count)}};
    std::cout << "clustering: " << rc.parameter_count << " params, " << rc.flop_count
              << " flops\nnormalized: " << rn.parameter_count << " params, " << rn.flop_count
              << " flops\nratios: params "
              << static_cast<double>(rn.parameter_count) / static_cast<double>(rc.parameter_count)
              << ", flops "
              << static_cast<double>(rn.flop_count) / static_cast<double>(rc.flop_count) << "\n";
    write_json(j, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV air-to-ground RSS simulation and RF source localization"};
    app.require_subcommand(1);

    std::string scenario_path, in_path, out_path, model_path, trace_path, source, variant,
        loss_curve;
    std::uint64_t seed = 0;
    std::size_t n_records = 100;
    TrainConfig tc;

    auto* sim = app.add_subcommand("simulate", "Generate a simulated RSS dataset");
    sim->add_option("--scenario", scenario_path, "Scenario config (JSON)");
    sim->add_option("--records,-n", n_records, "Number of records")->capture_default_str();
    sim->add_option("--seed", seed, "Master seed")->capture_default_str();
    sim->add_option("--out", out_path, "Output dataset path")->required();

    auto* feat = app.add_subcommand("features", "Dump 3D-clustering feature vectors to CSV");
    feat->add_option("--in", in_path, "Input dataset")->required();
    feat->add_option("--scenario", scenario_path, "Override pipeline config");
    feat->add_option("--seed", seed, "Clustering seed")->capture_default_str();
    feat->add_option("--out", out_path, "Output CSV")->required();

    auto* tr = app.add_subcommand("train", "Train the localizer");
    tr->add_option("--in", in_path, "Training dataset")->required();
    tr->add_option("--variant", variant, "clustering | normalized")
        ->default_val("clustering")
        ->check(CLI::IsMember({"clustering", "normalized"}));
    tr->add_option("--scenario", scenario_path, "Override pipeline config");
    tr->add_option("--epochs", tc.epochs)->capture_default_str();
    tr->add_option("--batch-size", tc.batch_size)->capture_default_str();
    tr->add_option("--learning-rate", tc.learning_rate)->capture_default_str();
    tr->add_option("--split", tc.split)->capture_default_str();
    tr->add_option("--seed", tc.seed)->capture_default_str();
    tr->add_option("--loss-curve", loss_curve, "Write per-epoch losses to CSV");
    tr->add_option("--out", out_path, "Output model path")->required();

    auto* pr = app.add_subcommand("predict", "Estimate a source position from a trace");
    pr->add_option("--model", model_path, "Model file")->required();
    pr->add_option("--trace", trace_path, "Measured trace CSV")->required();
    pr->add_option("--scenario", scenario_path, "Pipeline config");
    pr->add_option("--seed", seed, "Clustering seed")->capture_default_str();
    pr->add_option("--out", out_path, "Write the estimate as JSON");

    auto* ev = app.add_subcommand("eval", "Evaluate a model on a dataset");
    ev->add_option("--model", model_path, "Model file")->required();
    ev->add_option("--in", in_path, "Evaluation dataset")->required();
    ev->add_option("--scenario", scenario_path, "Override pipeline config");
    ev->add_option("--out", out_path, "Write the report as JSON");

    auto* cm = app.add_subcommand("compare-models",
                                  "Per-model CDFs of |measured - predicted| RSS");
    cm->add_option("--trace", trace_path, "Measured trace CSV")->required();
    cm->add_option("--scenario", scenario_path, "Scenario config");
    cm->add_option("--source", source, "Known source position x,y")->required();
    cm->add_option("--out", out_path, "Output CSV prefix");

    auto* fb = app.add_subcommand("fit-beta", "Fit the shadowing exponent from a trace");
    fb->add_option("--trace", trace_path, "Measured trace CSV")->required();
    fb->add_option("--scenario", scenario_path, "Scenario config");
    fb->add_option("--source", source, "Known source position x,y")->required();
    fb->add_option("--out", out_path, "Write the fit as JSON");

    auto* cx = app.add_subcommand("complexity", "Model parameter and FLOP accounting");
    cx->add_option("--scenario", scenario_path, "Scenario config");
    cx->add_option("--out", out_path, "Write the report as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(scenario_path, n_records, seed, out_path);
        if (feat->parsed()) return cmd_features(in_path, scenario_path, seed, out_path);
        if (tr->parsed()) return cmd_train(in_path, variant, scenario_path, tc, out_path, loss_curve);
        if (pr->parsed()) return cmd_predict(model_path, trace_path, scenario_path, seed, out_path);
        if (ev->parsed()) return cmd_eval(model_path, in_path, scenario_path, out_path);
        if (cm->parsed()) return cmd_compare_models(trace_path, scenario_path, source, out_path);
        if (fb->parsed()) return cmd_fit_beta(trace_path, scenario_path, source, out_path);
        if (cx->parsed()) return cmd_complexity(scenario_path, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
