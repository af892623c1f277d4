#include "rfsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rfsim/errors.hpp"
#include "rfsim/parallel.hpp"
#include "rfsim/rng.hpp"

namespace rfsim {

double positioning_error(const std::array<double, 2>& est, const std::array<double, 2>& truth) {
    return std::hypot(est[0] - truth[0], est[1] - truth[1]);
}

MeasuredTrace load_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trace file: " + path);
    MeasuredTrace trace;
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(path, 1, "empty trace file");
    ++lineno;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<std::string> fields;
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 5 && fields.size() != 8)
            throw ParseError(path, lineno, "expected 5 or 8 comma-separated fields");
        TraceSample s;
        try {
            s.t = std::stod(fields[0]);
            s.x = std::stod(fields[1]);
            s.y = std::stod(fields[2]);
            s.z = std::stod(fields[3]);
            s.rss_dbm = std::stod(fields[4]);
            if (fields.size() == 8) {
                s.att = AttitudeAngles::from_degrees(std::stod(fields[5]), std::stod(fields[6]),
                                                     std::stod(fields[7]));
                s.has_attitude = true;
            }
        } catch (const std::exception&) {
            throw ParseError(path, lineno, "non-numeric field");
        }
        if (!std::isfinite(s.rss_dbm)) throw ParseError(path, lineno, "non-finite rss");
        if (!trace.samples.empty() && s.t < trace.samples.back().t)
            throw ParseError(path, lineno, "timestamps must be nondecreasing");
        trace.samples.push_back(s);
    }
    if (trace.samples.empty()) throw ParseError(path, lineno, "trace file has no data rows");
    return trace;
}

void save_trace_csv(const MeasuredTrace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write trace file: " + path);
    const bool with_att =
        std::any_of(trace.samples.begin(), trace.samples.end(),
                    [](const TraceSample& s) { return s.has_attitude; });
    out << "t_s,x_m,y_m,z_m,rss_dbm";
    if (with_att) out << ",roll_deg,pitch_deg,yaw_deg";
    out << "\n";
    out.precision(17);
    for (const TraceSample& s : trace.samples) {
        out << s.t << "," << s.x << "," << s.y << "," << s.z << "," << s.rss_dbm;
        if (with_att)
            out << "," << rad2deg(s.att.roll) << "," << rad2deg(s.att.pitch) << ","
                << rad2deg(s.att.yaw);
        out << "\n";
    }
}

MeasuredTrace trace_from_log(const FlightLog& log, const std::vector<double>& rss) {
    if (log.samples.size() != rss.size())
        throw NumericError("trace_from_log: sample count mismatch");
    MeasuredTrace trace;
    trace.samples.reserve(rss.size());
    for (std::size_t i = 0; i < rss.size(); ++i) {
        const FlightSample& fs = log.samples[i];
        trace.samples.push_back({fs.t, fs.x, fs.y, fs.z, rss[i], fs.att, true});
    }
    return trace;
}

std::vector<CdfPoint> rss_abs_error_cdf(const MeasuredTrace& trace, const Scenario& sc,
                                        double source_x, double source_y,
                                        PropagationModel model) {
    if (trace.samples.empty()) throw DataError("rss_abs_error_cdf: empty trace");
    const Position tx{source_x, source_y, sc.source_height};
    std::vector<double> errors;
    errors.reserve(trace.samples.size());
    for (const TraceSample& s : trace.samples) {
        const Position rx{s.x, s.y, s.z};
        const AttitudeAngles att = s.has_attitude ? s.att : AttitudeAngles{};
        double pred = 0.0;
        // Trace attitudes feed the enhanced evaluator; the conventional
        // models do not consume attitude.
        switch (model) {
            case PropagationModel::fspl: pred = fspl_rss(sc.propagation, tx, rx); break;
            case PropagationModel::two_ray: pred = two_ray_rss(sc.propagation, tx, rx); break;
            case PropagationModel::enhanced_two_ray:
                pred = enhanced_two_ray_rss(sc.propagation, tx, rx, att);
                break;
        }
        errors.push_back(std::abs(s.rss_dbm - pred));
    }
    std::sort(errors.begin(), errors.end());
    std::vector<CdfPoint> cdf;
    cdf.reserve(errors.size());
    const double n = static_cast<double>(errors.size());
    for (std::size_t i = 0; i < errors.size(); ++i)
        cdf.push_back({errors[i], static_cast<double>(i + 1) / n});
    return cdf;
}

void save_cdf_csv(const std::vector<CdfPoint>& cdf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write cdf file: " + path);
    out << "abs_error,cumulative_fraction\n";
    out.precision(12);
    for (const CdfPoint& p : cdf) out << p.value << "," << p.fraction << "\n";
}

namespace {

std::vector<double> to_doubles(const std::vector<float>& v) {
    return std::vector<double>(v.begin(), v.end());
}

}  // namespace

std::vector<double> record_features(const DatasetRecord& rec, const PreprocessConfig& pre,
                                    ClusterConfig cluster) {
    return extract_features(to_doubles(rec.x), to_doubles(rec.y), to_doubles(rec.rss), pre, cluster)
        .values;
}

std::vector<double> record_normalized_input(const DatasetRecord& rec, const PreprocessConfig& pre) {
    return normalized_input(to_doubles(rec.rss), pre);
}

EvalReport evaluate_localizer(const ModelParams& model, const std::vector<DatasetRecord>& records,
                              const PreprocessConfig& pre, const ClusterConfig& cluster,
                              unsigned workers) {
    if (records.empty()) throw DataError("evaluate_localizer: no records");
    std::vector<std::vector<double>> inputs(records.size());
    parallel_for(records.size(), workers, [&](std::size_t i) {
        if (model.config.variant == ModelVariant::clustering) {
            ClusterConfig per_record = cluster;
            per_record.seed = mix_seed(cluster.seed, i);
            inputs[i] = record_features(records[i], pre, per_record);
        } else {
            inputs[i] = record_normalized_input(records[i], pre);
        }
    });
    const auto preds = forward_batch(model, inputs);

    EvalReport report;
    report.trials.reserve(records.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        EvalTrial trial;
        trial.truth_x = records[i].source_x;
        trial.truth_y = records[i].source_y;
        trial.est_x = preds[i][0];
        trial.est_y = preds[i][1];
        trial.error_m = positioning_error({trial.est_x, trial.est_y}, {trial.truth_x, trial.truth_y});
        sum += trial.error_m;
        report.trials.push_back(trial);
    }
    report.mean_error_m = sum / static_cast<double>(records.size());
    return report;
}

std::array<double, 2> argmax_rss_estimate(const DatasetRecord& rec) {
    if (rec.rss.empty()) throw DataError("argmax_rss_estimate: empty record");
    std::size_t best = 0;
    for (std::size_t i = 1; i < rec.rss.size(); ++i)
        if (rec.rss[i] > rec.rss[best]) best = i;
    return {static_cast<double>(rec.x[best]), static_cast<double>(rec.y[best])};
}

std::vector<TrajectoryEval> trajectory_generalization(
    const ModelParams& model, const Scenario& base,
    const std::vector<std::pair<std::string, Trajectory>>& trajectories,
    const std::vector<std::array<double, 2>>& trial_sources, std::uint64_t seed,
    unsigned workers) {
    if (trial_sources.empty()) throw ConfigError("trajectory_generalization: no trial sources");

    std::vector<TrajectoryEval> out;
    out.reserve(trajectories.size());
    for (std::size_t t = 0; t < trajectories.size(); ++t) {
        Scenario sc = base;
        sc.trajectory = trajectories[t].second;
        const Scenario scenario = finalize_scenario(sc);

        std::vector<DatasetRecord> records(trial_sources.size());
        parallel_for(trial_sources.size(), workers, [&](std::size_t i) {
            Rng rng(mix_seed(seed ^ (0x5bd1e995u + t), i));
            DatasetRecord& rec = records[i];
            rec.source_x = trial_sources[i][0];
            rec.source_y = trial_sources[i][1];
            const FlightLog log = sample_flight(scenario.trajectory, scenario.duration_s,
                                                scenario.dt_s, scenario.jitter_deg, rng.next_u64());
            const std::vector<double> rss =
                simulate_rss(scenario, log, rec.source_x, rec.source_y);
            rec.rss.resize(rss.size());
            rec.x.resize(rss.size());
            rec.y.resize(rss.size());
            for (std::size_t s = 0; s < rss.size(); ++s) {
                double v = rss[s];
                if (scenario.noise_std_db > 0.0) v += rng.normal(0.0, scenario.noise_std_db);
                rec.rss[s] = static_cast<float>(v);
                rec.x[s] = static_cast<float>(log.samples[s].x);
                rec.y[s] = static_cast<float>(log.samples[s].y);
            }
        });
        out.push_back({trajectories[t].first,
                       evaluate_localizer(model, records, scenario.preprocess, scenario.cluster,
                                          workers)});
    }
    return out;
}

}  // namespace rfsim
