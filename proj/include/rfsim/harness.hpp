#pragma once

#include <array>
#include <string>
#include <vector>

#include "rfsim/model.hpp"
#include "rfsim/scenario.hpp"

namespace rfsim {

// Externally collected (or exported) RSS trace along a flight.
struct TraceSample {
    double t = 0.0;
    double x = 0.0, y = 0.0, z = 0.0;
    double rss_dbm = 0.0;
    AttitudeAngles att;
    bool has_attitude = false;
};

struct MeasuredTrace {
    std::vector<TraceSample> samples;
};

struct CdfPoint {
    double value = 0.0;     // error magnitude (dB or m)
    double fraction = 0.0;  // cumulative
};

struct EvalTrial {
    double truth_x = 0.0, truth_y = 0.0;
    double est_x = 0.0, est_y = 0.0;
    double error_m = 0.0;
};

struct EvalReport {
    std::vector<EvalTrial> trials;
    double mean_error_m = 0.0;
};

double positioning_error(const std::array<double, 2>& est, const std::array<double, 2>& truth);

// CSV `t_s,x_m,y_m,z_m,rss_dbm[,roll_deg,pitch_deg,yaw_deg]`; missing
// attitude columns imply zero attitude.
MeasuredTrace load_trace_csv(const std::string& path);
void save_trace_csv(const MeasuredTrace& trace, const std::string& path);

MeasuredTrace trace_from_log(const FlightLog& log, const std::vector<double>& rss);

// Per-sample |measured - predicted| in dB under the given model, as an
// empirical CDF. Trace attitudes are used where present.
std::vector<CdfPoint> rss_abs_error_cdf(const MeasuredTrace& trace, const Scenario& sc,
                                        double source_x, double source_y, PropagationModel model);

void save_cdf_csv(const std::vector<CdfPoint>& cdf, const std::string& path);

// Clustering-variant input for one record.
std::vector<double> record_features(const DatasetRecord& rec, const PreprocessConfig& pre,
                                    ClusterConfig cluster);
// Normalized-RSS-variant input for one record.
std::vector<double> record_normalized_input(const DatasetRecord& rec, const PreprocessConfig& pre);

// Pipeline + model over each record; per-trial and mean 2D error.
EvalReport evaluate_localizer(const ModelParams& model, const std::vector<DatasetRecord>& records,
                              const PreprocessConfig& pre, const ClusterConfig& cluster,
                              unsigned workers = 1);

// Baselines for localization quality checks.
std::array<double, 2> argmax_rss_estimate(const DatasetRecord& rec);

struct TrajectoryEval {
    std::string name;
    EvalReport report;
};

// Re-simulates the trial sources on each trajectory and runs the frozen
// pipeline + model on every re-simulated flight.
std::vector<TrajectoryEval> trajectory_generalization(
    const ModelParams& model, const Scenario& base,
    const std::vector<std::pair<std::string, Trajectory>>& trajectories,
    const std::vector<std::array<double, 2>>& trial_sources, std::uint64_t seed,
    unsigned workers = 1);

}  // namespace rfsim
