#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfsim/features.hpp"
#include "rfsim/flight.hpp"
#include "rfsim/propagation.hpp"

namespace rfsim {

enum class PropagationModel { fspl, two_ray, enhanced_two_ray };

std::string to_string(PropagationModel m);
PropagationModel propagation_model_from_string(const std::string& s);

// Everything needed to synthesize one training/evaluation corpus.
struct Scenario {
    Rect source_region{0.0, 250.0, 0.0, 400.0};
    double source_height = 5.0;
    Rect flight_region{0.0, 220.0, 120.0, 400.0};
    double spacing = 40.0;
    double altitude = 30.0;
    Trajectory trajectory;  // built from flight_region/spacing unless loaded
    double duration_s = 600.0;
    double dt_s = 0.03;
    double jitter_deg = 5.0;
    double noise_std_db = 1.0;
    PropagationModel model = PropagationModel::enhanced_two_ray;
    PropagationParams propagation;
    PreprocessConfig preprocess;
    ClusterConfig cluster;

    void validate() const;
};

// One simulated flight against one source placement.
struct DatasetRecord {
    double source_x = 0.0;
    double source_y = 0.0;
    std::vector<float> rss;  // dBm per sample
    std::vector<float> x;    // UAV x per sample, m
    std::vector<float> y;    // UAV y per sample, m
};

// Builds the default spiral over the flight region when no trajectory has
// been supplied yet.
Scenario finalize_scenario(Scenario sc);

// RSS for every sample of a flight log against a fixed source.
std::vector<double> simulate_rss(const Scenario& sc, const FlightLog& log, double src_x,
                                 double src_y);

// Per record: uniform source placement, freshly jittered flight, per-sample
// RSS under the configured model, Gaussian dB noise. Record i depends only
// on (seed, i), so any record subset or generation order yields identical
// bytes. `workers` > 1 fans records out across threads.
std::vector<DatasetRecord> generate_dataset(const Scenario& sc, std::size_t n_records,
                                            std::uint64_t seed, unsigned workers = 1);

// Container: magic + JSON header (schema version, scenario echo, checksum)
// followed by little-endian float32 blocks per record.
void save_dataset(const std::vector<DatasetRecord>& records, const Scenario& sc,
                  const std::string& path);
std::vector<DatasetRecord> load_dataset(const std::string& path, Scenario* scenario_out = nullptr);

// Scenario config: JSON document; every key can be overridden through
// RFSIM_-prefixed environment variables (RFSIM_<SECTION>__<KEY>).
Scenario load_scenario(const std::string& path, bool apply_env_overrides = true);
Scenario scenario_from_json_text(const std::string& text, bool apply_env_overrides = false);
std::string scenario_to_json_text(const Scenario& sc);

}  // namespace rfsim
