// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Run with no arguments for all criteria or with a list of ids (1..10).
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rfsim/harness.hpp"
#include "rfsim/parallel.hpp"
#include "rfsim/rng.hpp"

using namespace rfsim;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

using CheckFn = std::function<Outcome()>;

void expect(Outcome& o, bool cond, const std::string& what) {
    if (!cond) {
        o.pass = false;
        if (!o.detail.empty()) o.detail += "; ";
        o.detail += what;
    }
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

// ---------------------------------------------------------------- 1
Outcome geometry_suite() {
    Outcome o;
    Rng rng(1000);
    double worst_orto = 0.0, worst_det = 0.0, worst_rt = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const AttitudeAngles att{rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi),
                                 rng.uniform(-kPi, kPi)};
        const Mat3 r = rotation_matrix(att);
        const Mat3 rtr = r.transposed() * r;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                worst_orto = std::max(worst_orto, std::abs(rtr(a, b) - (a == b ? 1.0 : 0.0)));
        worst_det = std::max(worst_det, std::abs(r.determinant() - 1.0));

        SphericalDirection d{rng.uniform(-kPi / 2 * 0.999, kPi / 2 * 0.999),
                             rng.uniform(-kPi, kPi * 0.999)};
        const SphericalDirection back = angles_from_direction(direction_from_angles(d));
        worst_rt = std::max(worst_rt, std::abs(back.theta - d.theta));
        worst_rt = std::max(worst_rt, std::abs(wrap_angle(back.phi - d.phi)));
    }
    expect(o, worst_orto < 1e-9, "orthonormality " + fmt(worst_orto));
    expect(o, worst_det < 1e-9, "determinant " + fmt(worst_det));
    expect(o, worst_rt < 1e-9, "round trip " + fmt(worst_rt));
    o.detail = "orto " + fmt(worst_orto) + ", det " + fmt(worst_det) + ", rt " + fmt(worst_rt);
    return o;
}

// ---------------------------------------------------------------- 2
Outcome propagation_degeneracy() {
    Outcome o;
    PropagationParams iso;
    iso.tx_pattern = AntennaPattern::isotropic(0.0);
    iso.rx_pattern = AntennaPattern::isotropic(0.0);
    iso.epsilon_r = 1.0;

    Rng rng(2000);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Position tx{rng.uniform(-300, 300), rng.uniform(-300, 300), rng.uniform(0.5, 10)};
        const Position rx{rng.uniform(-300, 300), rng.uniform(-300, 300), rng.uniform(15, 80)};
        worst = std::max(worst, std::abs(two_ray_rss(iso, tx, rx) - fspl_rss(iso, tx, rx)));
    }
    expect(o, worst < 1e-9, "two-ray vs fspl " + fmt(worst));

    // branch identity of the enhanced model, both branches exercised
    PropagationParams p;
    p.epsilon_r = 2.0;
    std::size_t shadowed = 0, clear = 0;
    bool exact = true;
    for (int i = 0; i < 1000; ++i) {
        // half the draws aim straight down a leg azimuth at shallow elevation
        const bool aimed = (i % 2 == 0);
        const double az = aimed ? 39.0 + rng.uniform(-4.0, 4.0) : rng.uniform(0.0, 360.0);
        const double elev = aimed ? rng.uniform(-8.0, 8.0) : rng.uniform(-60.0, 60.0);
        const double d2d = rng.uniform(50.0, 500.0);
        const double dz = d2d * std::tan(deg2rad(-elev));  // tx below rx by dz
        const double rxz = std::max(12.0, 5.0 + dz);
        const Position rx{0.0, 0.0, rxz};
        const Position tx{d2d * std::cos(deg2rad(az)), d2d * std::sin(deg2rad(az)),
                          rxz - dz <= 0.0 ? 0.5 : rxz - dz};
        // aimed draws keep the yaw small so the leg stays in front of the TX
        // in the body frame; the rest sweep attitudes freely
        const AttitudeAngles att =
            aimed ? AttitudeAngles{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05),
                                   rng.uniform(-0.05, 0.05)}
                  : AttitudeAngles{rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1),
                                   rng.uniform(-kPi, kPi)};

        const LinkGeometry g = link_geometry(tx, rx, p.f_c_hz);
        SphericalDirection dir = g.los_direction();
        if (p.shadow.frame == ShadowModel::Frame::body && !att.is_zero())
            dir = direction_in_body_frame(att, dir);
        const bool s = is_shadowed(dir, p.shadow);
        (s ? shadowed : clear) += 1;

        const double base = two_ray_rss(p, tx, rx, att);
        const double enhanced = enhanced_two_ray_rss(p, tx, rx, att);
        if (s) {
            if (enhanced != base - shadow_loss(g.d_los, p.shadow)) exact = false;
        } else {
            if (enhanced != base) exact = false;
        }
    }
    expect(o, exact, "enhanced branch identity violated");
    expect(o, shadowed > 50 && clear > 50,
           "branch coverage s=" + std::to_string(shadowed) + " c=" + std::to_string(clear));
    o.detail += "degeneracy " + fmt(worst) + ", shadowed " + std::to_string(shadowed) + "/1000";
    return o;
}

// ---------------------------------------------------------------- 3
Outcome beta_recovery() {
    Outcome o;
    Rng rng(3000);
    double worst_clean = 0.0, worst_noisy = 0.0;
    for (double beta : {1.5, 2.0, 2.7, 3.5}) {
        ShadowModel sh;
        sh.beta = beta;
        std::vector<double> measured, simulated, d;
        std::vector<bool> flags;
        for (int i = 0; i < 800; ++i) {
            const double dist = rng.uniform(35.0, 600.0);
            const double sim = -35.0 - 22.0 * std::log10(dist) + rng.uniform(-3.0, 3.0);
            d.push_back(dist);
            simulated.push_back(sim);
            flags.push_back(true);
            measured.push_back(sim - shadow_loss(dist, sh));
        }
        worst_clean = std::max(worst_clean,
                               std::abs(fit_beta(measured, simulated, flags, d, sh.d0) - beta));

        std::vector<double> noisy = measured;
        for (double& v : noisy) v += rng.normal(0.0, 1.0);
        worst_noisy = std::max(worst_noisy,
                               std::abs(fit_beta(noisy, simulated, flags, d, sh.d0) - beta));
    }
    expect(o, worst_clean < 1e-9, "noise-free error " + fmt(worst_clean));
    expect(o, worst_noisy < 0.05, "noisy error " + fmt(worst_noisy));
    o.detail = "clean " + fmt(worst_clean) + ", noisy " + fmt(worst_noisy);
    return o;
}

// ---------------------------------------------------------------- 4
Outcome preprocessing_identities() {
    Outcome o;
    const auto kernel = gaussian_kernel(20);
    expect(o, kernel.size() == 121, "kernel size " + std::to_string(kernel.size()));
    const double sum = std::accumulate(kernel.begin(), kernel.end(), 0.0);
    expect(o, std::abs(sum - 1.0) < 1e-12, "kernel sum " + fmt(sum));

    const std::vector<double> c(2048, -61.25);
    const auto sm = smooth(c, 20);
    double worst = 0.0;
    for (double v : sm) worst = std::max(worst, std::abs(v + 61.25));
    expect(o, worst < 1e-12, "constant drift " + fmt(worst));

    expect(o, group_average({1, 3, 5, 7}, 2) == std::vector<double>({2, 6}), "group fixture");
    const std::vector<double> arb{9.5, -3.25, 0.125};
    expect(o, group_average(arb, 1) == arb, "identity grouping");
    expect(o, group_average(std::vector<double>(20000, 0.0), 2).size() == 10000, "paper sizing");
    return o;
}

// ---------------------------------------------------------------- 5
Outcome feature_contract() {
    Outcome o;
    Scenario sc;  // default scenario: 600 s at 0.03 s -> 20000 samples
    sc.model = PropagationModel::enhanced_two_ray;
    const std::size_t n_records = 8;

    const auto records = generate_dataset(sc, n_records, 55, default_workers());
    for (const auto& rec : records)
        expect(o, rec.rss.size() == 20000, "sample count " + std::to_string(rec.rss.size()));

    auto run_with_workers = [&](unsigned workers) {
        std::vector<std::vector<double>> features(records.size());
        parallel_for(records.size(), workers, [&](std::size_t i) {
            ClusterConfig cluster = sc.cluster;
            cluster.seed = mix_seed(77, i);
            features[i] = record_features(records[i], sc.preprocess, cluster);
        });
        return features;
    };
    const auto f1 = run_with_workers(1);
    const auto f8 = run_with_workers(8);
    expect(o, f1 == f8, "1-thread vs 8-thread features differ");
    const auto f1_again = run_with_workers(1);
    expect(o, f1 == f1_again, "repeat run differs");

    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& fv = f1[r];
        expect(o, fv.size() == 60, "feature length " + std::to_string(fv.size()));
        for (std::size_t cidx = 1; cidx < 20; ++cidx)
            expect(o, fv[3 * cidx] <= fv[3 * (cidx - 1)] + 1e-12, "p-bar ordering");

        std::vector<std::array<double, 2>> pts;
        pts.reserve(records[r].x.size());
        for (std::size_t i = 0; i < records[r].x.size(); ++i)
            pts.push_back({static_cast<double>(records[r].x[i]),
                           static_cast<double>(records[r].y[i])});
        const auto hull = oracle::convex_hull(pts);
        for (std::size_t cidx = 0; cidx < 20; ++cidx)
            expect(o, oracle::inside_hull(fv[3 * cidx + 1], fv[3 * cidx + 2], hull, 1e-6),
                   "feature coordinates outside the flight hull");
    }
    return o;
}

// ---------------------------------------------------------------- 6
Outcome model_sizing() {
    Outcome o;
    const ComplexityReport rc = count_complexity(ModelConfig::clustering_default());
    const ComplexityReport rn = count_complexity(ModelConfig::normalized_default());
    const double pr = static_cast<double>(rn.parameter_count) /
                      static_cast<double>(rc.parameter_count);
    const double fr = static_cast<double>(rn.flop_count) / static_cast<double>(rc.flop_count);
    expect(o, rc.parameter_count >= 160000 && rc.parameter_count <= 240000,
           "clustering params " + std::to_string(rc.parameter_count));
    expect(o, pr >= 28.5 && pr <= 38.5, "param ratio " + fmt(pr));
    expect(o, fr > 100.0, "flop ratio " + fmt(fr));
    o.detail = std::to_string(rc.parameter_count) + " params, ratio " + fmt(pr) + ", flops x" +
               fmt(fr);
    return o;
}

// ---------------------------------------------------------------- 7
Outcome gradient_correctness() {
    Outcome o;
    ModelConfig cfg;
    cfg.input_len = 24;
    cfg.stem_filters = 6;
    cfg.block_filters = {6, 10};
    cfg.mlp_dims = {16, 12, 8, 2};
    const ModelParams m = build_model(cfg, 7000);
    Rng rng(7001);
    std::vector<double> input(cfg.input_len);
    for (double& v : input) v = rng.uniform(-80.0, -30.0);
    const double err = gradient_check(m, input, {120.0, 250.0}, 256, 1e-4, 7002);
    expect(o, err < 1e-4, "max relative error " + fmt(err));
    o.detail = "max rel err " + fmt(err);
    return o;
}

// shared desk-scale training helpers ------------------------------

std::vector<std::vector<double>> clustering_inputs(const std::vector<DatasetRecord>& records,
                                                   const Scenario& sc, std::uint64_t seed) {
    std::vector<std::vector<double>> inputs(records.size());
    parallel_for(records.size(), default_workers(), [&](std::size_t i) {
        ClusterConfig cluster = sc.cluster;
        cluster.seed = mix_seed(seed, i);
        inputs[i] = record_features(records[i], sc.preprocess, cluster);
    });
    return inputs;
}

TrainingSet to_training_set(const std::vector<DatasetRecord>& records,
                            std::vector<std::vector<double>> inputs) {
    TrainingSet data;
    data.inputs = std::move(inputs);
    data.labels_m.reserve(records.size());
    for (const auto& rec : records) data.labels_m.push_back({rec.source_x, rec.source_y});
    return data;
}

// ---------------------------------------------------------------- 8
Outcome sim2sim_localization() {
    Outcome o;
    Scenario sc;  // defaults: enhanced two-ray, 20000 samples, 1 dB noise
    const std::size_t n_train = 500, n_test = 50;

    const auto train_records = generate_dataset(sc, n_train, 42, default_workers());
    // held-out scenarios from an independent stream
    const auto test_records = generate_dataset(sc, n_test, mix_seed(42, 0xE0E0), default_workers());

    ModelParams model = build_model(ModelConfig::clustering_default(sc.cluster.n_clusters), 42);
    TrainConfig tc;
    tc.epochs = 100;
    tc.seed = 42;
    const TrainingSet data = to_training_set(train_records, clustering_inputs(train_records, sc, 42));
    const TrainResult res = train(model, data, tc);

    const EvalReport report = evaluate_localizer(model, test_records, sc.preprocess, sc.cluster,
                                                 default_workers());

    double argmax_sum = 0.0, centroid_sum = 0.0;
    for (const auto& rec : test_records) {
        argmax_sum += positioning_error(argmax_rss_estimate(rec), {rec.source_x, rec.source_y});
        centroid_sum += positioning_error({sc.source_region.cx(), sc.source_region.cy()},
                                          {rec.source_x, rec.source_y});
    }
    const double argmax_mean = argmax_sum / static_cast<double>(n_test);
    const double centroid_mean = centroid_sum / static_cast<double>(n_test);

    expect(o, report.mean_error_m <= 0.7 * argmax_mean,
           "vs argmax: " + fmt(report.mean_error_m) + " !<= 0.7*" + fmt(argmax_mean));
    expect(o, report.mean_error_m <= 0.5 * centroid_mean,
           "vs centroid: " + fmt(report.mean_error_m) + " !<= 0.5*" + fmt(centroid_mean));
    o.detail = "model " + fmt(report.mean_error_m) + " m, argmax " + fmt(argmax_mean) +
               " m, centroid " + fmt(centroid_mean) + " m, final val loss " +
               fmt(res.val_loss_m2.back()) + " m^2";
    return o;
}

// ---------------------------------------------------------------- 9
Outcome cross_model_ordering() {
    Outcome o;
    Scenario sc;
    sc.noise_std_db = 0.0;  // ground truth traces: enhanced two-ray + jitter only
    const Scenario scenario = finalize_scenario(sc);

    Rng rng(9000);
    std::vector<double> err_fspl, err_two_ray, err_e2r;
    for (int trial = 0; trial < 4; ++trial) {
        const double sx = rng.uniform(scenario.source_region.x0, scenario.source_region.x1);
        const double sy = rng.uniform(scenario.source_region.y0, scenario.source_region.y1);
        const FlightLog log = sample_flight(scenario.trajectory, scenario.duration_s, scenario.dt_s,
                                            scenario.jitter_deg, rng.next_u64());
        const MeasuredTrace trace = trace_from_log(log, simulate_rss(scenario, log, sx, sy));
        for (const auto& [dst, model] :
             {std::pair{&err_fspl, PropagationModel::fspl},
              std::pair{&err_two_ray, PropagationModel::two_ray},
              std::pair{&err_e2r, PropagationModel::enhanced_two_ray}}) {
            const auto cdf = rss_abs_error_cdf(trace, scenario, sx, sy, model);
            for (const auto& p : cdf) dst->push_back(p.value);
        }
    }
    const double m_fspl = median(err_fspl);
    const double m_two = median(err_two_ray);
    const double m_e2r = median(err_e2r);
    expect(o, m_e2r < m_fspl, "e2r " + fmt(m_e2r) + " !< fspl " + fmt(m_fspl));
    expect(o, m_e2r < m_two, "e2r " + fmt(m_e2r) + " !< two-ray " + fmt(m_two));
    o.detail = "medians: e2r " + fmt(m_e2r) + ", two-ray " + fmt(m_two) + ", fspl " + fmt(m_fspl);
    return o;
}

// ---------------------------------------------------------------- 10
Outcome trajectory_generalization_direction() {
    Outcome o;
    // Desk-scale setup: shorter flights and a coarser grouping keep the
    // normalized variant trainable on one core; the comparison itself is
    // unchanged.
    Scenario sc;
    sc.duration_s = 150.0;  // 5000 samples
    sc.preprocess.group_size = 4;
    const Scenario base = finalize_scenario(sc);
    const std::size_t n_records = 200;

    const auto records = generate_dataset(base, n_records, 4242, default_workers());

    // clustering-variant model
    ModelParams clustering_model =
        build_model(ModelConfig::clustering_default(base.cluster.n_clusters), 10);
    {
        TrainConfig tc;
        tc.epochs = 60;
        tc.batch_size = 16;
        tc.seed = 10;
        train(clustering_model, to_training_set(records, clustering_inputs(records, base, 4242)),
              tc);
    }

    // normalized-variant model; trained with a light decay so it genuinely
    // fits its own trajectory (the comparison needs a competent baseline,
    // not one regularized into a constant predictor)
    std::vector<std::vector<double>> norm_inputs(records.size());
    parallel_for(records.size(), default_workers(), [&](std::size_t i) {
        norm_inputs[i] = record_normalized_input(records[i], base.preprocess);
    });
    ModelParams normalized_model =
        build_model(ModelConfig::normalized_default(norm_inputs.front().size()), 11);
    {
        TrainConfig tc;
        tc.epochs = 60;
        tc.batch_size = 8;
        tc.seed = 11;
        tc.weight_decay = 1e-4;
        train(normalized_model, to_training_set(records, std::move(norm_inputs)), tc);
    }

    // fresh trial sources, evaluated on the training trajectory and four
    // synthetic alternates
    Rng rng(1212);
    std::vector<std::array<double, 2>> sources;
    for (int i = 0; i < 12; ++i)
        sources.push_back({rng.uniform(base.source_region.x0, base.source_region.x1),
                           rng.uniform(base.source_region.y0, base.source_region.y1)});

    std::vector<std::pair<std::string, Trajectory>> trajectories;
    trajectories.emplace_back("training_spiral", base.trajectory);
    trajectories.emplace_back("lawnmower",
                              lawnmower_trajectory(base.flight_region, base.spacing, base.altitude));
    trajectories.emplace_back(
        "coarse_spiral",
        spiral_trajectory(base.flight_region, base.spacing * 2.0, base.altitude));
    trajectories.emplace_back("perimeter", perimeter_trajectory(base.flight_region, base.altitude));
    trajectories.emplace_back(
        "random_waypoints",
        random_waypoint_trajectory(base.flight_region, 14, base.altitude, 77));

    auto degradation = [&](const ModelParams& model) {
        const auto evals =
            trajectory_generalization(model, base, trajectories, sources, 999, default_workers());
        const double own = evals.front().report.mean_error_m;
        double worst = 0.0;
        for (std::size_t i = 1; i < evals.size(); ++i)
            worst = std::max(worst, evals[i].report.mean_error_m);
        return std::pair{own, worst / own};
    };
    const auto [own_c, factor_c] = degradation(clustering_model);
    const auto [own_n, factor_n] = degradation(normalized_model);

    expect(o, factor_c < factor_n,
           "clustering factor " + fmt(factor_c) + " !< normalized factor " + fmt(factor_n));
    o.detail = "clustering own " + fmt(own_c) + " m, worst x" + fmt(factor_c) +
               "; normalized own " + fmt(own_n) + " m, worst x" + fmt(factor_n);
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, CheckFn>> criteria = {
        {"geometry suite", geometry_suite},
        {"propagation degeneracy", propagation_degeneracy},
        {"shadow-exponent recovery", beta_recovery},
        {"preprocessing identities", preprocessing_identities},
        {"feature-vector contract", feature_contract},
        {"model sizing vs published totals", model_sizing},
        {"gradient correctness", gradient_correctness},
        {"sim2sim localization", sim2sim_localization},
        {"cross-model ordering", cross_model_ordering},
        {"trajectory generalization direction", trajectory_generalization_direction},
    };

    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::stoul(argv[i])));

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() && !selected.count(i + 1)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = criteria[i].second();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": "
                  << criteria[i].first;
        if (!out.detail.empty()) std::cout << " (" << out.detail << ")";
        std::cout << " [" << fmt(secs) << " s]" << std::endl;
        if (!out.pass) ++failures;
    }
    return failures;
}
