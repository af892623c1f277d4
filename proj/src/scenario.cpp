#include "rfsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rfsim/errors.hpp"
#include "rfsim/parallel.hpp"
#include "rfsim/rng.hpp"

extern char** environ;

namespace rfsim {

using nlohmann::json;

std::string to_string(PropagationModel m) {
    switch (m) {
        case PropagationModel::fspl: return "fspl";
        case PropagationModel::two_ray: return "two_ray";
        case PropagationModel::enhanced_two_ray: return "enhanced_two_ray";
    }
    return "enhanced_two_ray";
}

PropagationModel propagation_model_from_string(const std::string& s) {
    if (s == "fspl") return PropagationModel::fspl;
    if (s == "two_ray") return PropagationModel::two_ray;
    if (s == "enhanced_two_ray") return PropagationModel::enhanced_two_ray;
    throw ConfigError("unknown propagation model: " + s);
}

void Scenario::validate() const {
    if (source_height <= 0.0) throw ConfigError("scenario: source_height must be positive");
    if (noise_std_db < 0.0) throw ConfigError("scenario: noise_std must be >= 0");
    if (duration_s <= 0.0 || dt_s <= 0.0) throw ConfigError("scenario: duration and dt must be positive");
    if (jitter_deg < 0.0) throw ConfigError("scenario: jitter must be >= 0");
    if (source_region.width() <= 0.0 || source_region.height() <= 0.0)
        throw ConfigError("scenario: source region must have positive extent");
}

Scenario finalize_scenario(Scenario sc) {
    sc.validate();
    if (sc.trajectory.waypoints.empty())
        sc.trajectory = spiral_trajectory(sc.flight_region, sc.spacing, sc.altitude);
    return sc;
}

std::vector<double> simulate_rss(const Scenario& sc, const FlightLog& log, double src_x,
                                 double src_y) {
    const Position tx{src_x, src_y, sc.source_height};
    std::vector<double> out;
    out.reserve(log.samples.size());
    for (const FlightSample& s : log.samples) {
        const Position rx{s.x, s.y, s.z};
        double v = 0.0;
        // The conventional models are attitude-agnostic; rotated gains and
        // leg shadowing belong to the enhanced model alone.
        switch (sc.model) {
            case PropagationModel::fspl:
                v = fspl_rss(sc.propagation, tx, rx);
                break;
            case PropagationModel::two_ray:
                v = two_ray_rss(sc.propagation, tx, rx);
                break;
            case PropagationModel::enhanced_two_ray:
                v = enhanced_two_ray_rss(sc.propagation, tx, rx, s.att);
                break;
        }
        out.push_back(v);
    }
    return out;
}

std::vector<DatasetRecord> generate_dataset(const Scenario& sc, std::size_t n_records,
                                            std::uint64_t seed, unsigned workers) {
    if (n_records == 0) throw ConfigError("generate_dataset: need at least one record");
    const Scenario scenario = finalize_scenario(sc);

    std::vector<DatasetRecord> records(n_records);
    parallel_for(n_records, workers, [&](std::size_t i) {
        try {
            Rng rng(mix_seed(seed, i));
            DatasetRecord& rec = records[i];
            rec.source_x = rng.uniform(scenario.source_region.x0, scenario.source_region.x1);
            rec.source_y = rng.uniform(scenario.source_region.y0, scenario.source_region.y1);
            const std::uint64_t flight_seed = rng.next_u64();
            const FlightLog log = sample_flight(scenario.trajectory, scenario.duration_s,
                                                scenario.dt_s, scenario.jitter_deg, flight_seed);
            const std::vector<double> rss = simulate_rss(scenario, log, rec.source_x, rec.source_y);
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
        } catch (const std::exception& e) {
            throw NumericError("record " + std::to_string(i) + ": " + e.what());
        }
    });
    return records;
}

namespace {

constexpr char kDatasetMagic[4] = {'R', 'F', 'D', 'S'};
constexpr std::uint32_t kDatasetVersion = 1;

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw DataError(path + ": truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

// Float serialization assumes IEEE-754 hosts; bytes are written little endian.
void append_f32(std::string& buf, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    buf.push_back(static_cast<char>(u & 0xff));
    buf.push_back(static_cast<char>((u >> 8) & 0xff));
    buf.push_back(static_cast<char>((u >> 16) & 0xff));
    buf.push_back(static_cast<char>((u >> 24) & 0xff));
}

void append_f64(std::string& buf, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

float take_f32(const std::string& buf, std::size_t& pos, const std::string& path) {
    if (pos + 4 > buf.size()) throw DataError(path + ": truncated record payload");
    std::uint32_t u = 0;
    for (int i = 0; i < 4; ++i)
        u |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    float v;
    std::memcpy(&v, &u, 4);
    return v;
}

double take_f64(const std::string& buf, std::size_t& pos, const std::string& path) {
    if (pos + 8 > buf.size()) throw DataError(path + ": truncated record payload");
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i)
        u |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

json pattern_to_json(const AntennaPattern& p) {
    if (p.is_analytic()) return json{{"type", "dipole"}, {"g_max", p.peak_gain()}};
    return json{{"type", "grid"},
                {"theta_deg", p.theta_grid()},
                {"phi_deg", p.phi_grid()},
                {"gain_dbi", p.gain_grid()}};
}

AntennaPattern pattern_from_json(const json& j) {
    const std::string type = j.value("type", "dipole");
    if (type == "dipole") return AntennaPattern::dipole(j.value("g_max", kDipolePeakGain));
    if (type == "isotropic") return AntennaPattern::isotropic(j.value("gain_dbi", 0.0));
    if (type == "file") return load_pattern(j.at("path").get<std::string>());
    if (type == "grid")
        return AntennaPattern::gridded(j.at("theta_deg").get<std::vector<double>>(),
                                       j.at("phi_deg").get<std::vector<double>>(),
                                       j.at("gain_dbi").get<std::vector<double>>());
    throw ConfigError("unknown antenna pattern type: " + type);
}

json rect_to_json(const Rect& r) {
    return json{{"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}};
}

Rect rect_from_json(const json& j, const Rect& fallback) {
    Rect r = fallback;
    r.x0 = j.value("x0", r.x0);
    r.x1 = j.value("x1", r.x1);
    r.y0 = j.value("y0", r.y0);
    r.y1 = j.value("y1", r.y1);
    return r;
}

json scenario_to_json(const Scenario& sc) {
    const ShadowModel& sh = sc.propagation.shadow;
    json j;
    j["source_region"] = rect_to_json(sc.source_region);
    j["source_height"] = sc.source_height;
    j["flight_region"] = rect_to_json(sc.flight_region);
    j["spacing"] = sc.spacing;
    j["altitude"] = sc.altitude;
    j["duration_s"] = sc.duration_s;
    j["dt_s"] = sc.dt_s;
    j["jitter_deg"] = sc.jitter_deg;
    j["noise_std_db"] = sc.noise_std_db;
    j["model"] = to_string(sc.model);
    j["propagation"] = {
        {"p_t_dbm", sc.propagation.p_t_dbm},
        {"f_c_hz", sc.propagation.f_c_hz},
        {"epsilon_r", sc.propagation.epsilon_r},
        {"polarization", sc.propagation.polarization == Polarization::vertical ? "vertical" : "horizontal"},
        {"tx_pattern", pattern_to_json(sc.propagation.tx_pattern)},
        {"rx_pattern", pattern_to_json(sc.propagation.rx_pattern)},
        {"shadow",
         {{"leg_azimuths_deg", sh.leg_azimuths_deg},
          {"angular_spread_deg", sh.angular_spread_deg},
          {"elevation_threshold_deg", sh.elevation_threshold_deg},
          {"beta", sh.beta},
          {"d0_m", sh.d0},
          {"frame", sh.frame == ShadowModel::Frame::body ? "body" : "world"},
          {"elevation_from_unrotated_los", sh.elevation_from_unrotated_los}}},
    };
    j["preprocess"] = {
        {"group_size", sc.preprocess.group_size},
        {"sigma", sc.preprocess.sigma},
        {"normalization", sc.preprocess.normalization == Normalization::zscore ? "zscore" : "minmax"},
    };
    j["cluster"] = {
        {"n_clusters", sc.cluster.n_clusters},
        {"top_n", sc.cluster.top_n},
        {"max_iters", sc.cluster.max_iters},
        {"seed", sc.cluster.seed},
    };
    return j;
}

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    sc.source_region = rect_from_json(j.value("source_region", json::object()), sc.source_region);
    sc.source_height = j.value("source_height", sc.source_height);
    sc.flight_region = rect_from_json(j.value("flight_region", json::object()), sc.flight_region);
    sc.spacing = j.value("spacing", sc.spacing);
    sc.altitude = j.value("altitude", sc.altitude);
    sc.duration_s = j.value("duration_s", sc.duration_s);
    sc.dt_s = j.value("dt_s", sc.dt_s);
    sc.jitter_deg = j.value("jitter_deg", sc.jitter_deg);
    sc.noise_std_db = j.value("noise_std_db", sc.noise_std_db);
    if (j.contains("model")) sc.model = propagation_model_from_string(j.at("model").get<std::string>());
    if (j.contains("propagation")) {
        const json& p = j.at("propagation");
        sc.propagation.p_t_dbm = p.value("p_t_dbm", sc.propagation.p_t_dbm);
        sc.propagation.f_c_hz = p.value("f_c_hz", sc.propagation.f_c_hz);
        sc.propagation.epsilon_r = p.value("epsilon_r", sc.propagation.epsilon_r);
        if (p.contains("polarization")) {
            const std::string pol = p.at("polarization").get<std::string>();
            if (pol == "vertical") sc.propagation.polarization = Polarization::vertical;
            else if (pol == "horizontal") sc.propagation.polarization = Polarization::horizontal;
            else throw ConfigError("unknown polarization: " + pol);
        }
        if (p.contains("tx_pattern")) sc.propagation.tx_pattern = pattern_from_json(p.at("tx_pattern"));
        if (p.contains("rx_pattern")) sc.propagation.rx_pattern = pattern_from_json(p.at("rx_pattern"));
        if (p.contains("shadow")) {
            const json& s = p.at("shadow");
            ShadowModel& sh = sc.propagation.shadow;
            if (s.contains("leg_azimuths_deg"))
                sh.leg_azimuths_deg = s.at("leg_azimuths_deg").get<std::vector<double>>();
            sh.angular_spread_deg = s.value("angular_spread_deg", sh.angular_spread_deg);
            sh.elevation_threshold_deg = s.value("elevation_threshold_deg", sh.elevation_threshold_deg);
            sh.beta = s.value("beta", sh.beta);
            sh.d0 = s.value("d0_m", sh.d0);
            if (s.contains("frame")) {
                const std::string f = s.at("frame").get<std::string>();
                if (f == "body") sh.frame = ShadowModel::Frame::body;
                else if (f == "world") sh.frame = ShadowModel::Frame::world;
                else throw ConfigError("unknown shadow frame: " + f);
            }
            sh.elevation_from_unrotated_los =
                s.value("elevation_from_unrotated_los", sh.elevation_from_unrotated_los);
        }
    }
    if (j.contains("preprocess")) {
        const json& p = j.at("preprocess");
        sc.preprocess.group_size = p.value("group_size", sc.preprocess.group_size);
        sc.preprocess.sigma = p.value("sigma", sc.preprocess.sigma);
        if (p.contains("normalization")) {
            const std::string m = p.at("normalization").get<std::string>();
            if (m == "zscore") sc.preprocess.normalization = Normalization::zscore;
            else if (m == "minmax") sc.preprocess.normalization = Normalization::minmax;
            else throw ConfigError("unknown normalization: " + m);
        }
    }
    if (j.contains("cluster")) {
        const json& c = j.at("cluster");
        sc.cluster.n_clusters = c.value("n_clusters", sc.cluster.n_clusters);
        sc.cluster.top_n = c.value("top_n", sc.cluster.top_n);
        sc.cluster.max_iters = c.value("max_iters", sc.cluster.max_iters);
        sc.cluster.seed = c.value("seed", sc.cluster.seed);
    }
    if (j.contains("trajectory_csv"))
        sc.trajectory = load_trajectory_csv(j.at("trajectory_csv").get<std::string>(), sc.altitude);
    sc.validate();
    return sc;
}

// RFSIM_<PATH>__<KEY>=value overrides config keys; path segments are
// separated by double underscores and matched case-insensitively.
void apply_env(json& j) {
    for (char** env = environ; *env != nullptr; ++env) {
        const std::string entry(*env);
        if (entry.rfind("RFSIM_", 0) != 0) continue;
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string key = entry.substr(6, eq - 6);
        const std::string value = entry.substr(eq + 1);
        if (key == "WORKERS") continue;  // runtime knob, not a config key
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        json* node = &j;
        std::size_t start = 0;
        bool ok = true;
        while (true) {
            const std::size_t sep = key.find("__", start);
            const std::string part = key.substr(start, sep == std::string::npos ? sep : sep - start);
            if (sep == std::string::npos) {
                json parsed;
                try {
                    parsed = json::parse(value);
                } catch (const json::exception&) {
                    parsed = value;  // fall back to a plain string
                }
                (*node)[part] = parsed;
                break;
            }
            if (!node->contains(part) || !(*node)[part].is_object()) (*node)[part] = json::object();
            node = &(*node)[part];
            start = sep + 2;
            if (start >= key.size()) {
                ok = false;
                break;
            }
        }
        (void)ok;
    }
}

}  // namespace

void save_dataset(const std::vector<DatasetRecord>& records, const Scenario& sc,
                  const std::string& path) {
    std::string payload;
    for (const DatasetRecord& rec : records) {
        append_f64(payload, rec.source_x);
        append_f64(payload, rec.source_y);
        for (float v : rec.rss) append_f32(payload, v);
        for (float v : rec.x) append_f32(payload, v);
        for (float v : rec.y) append_f32(payload, v);
    }

    json header;
    header["version"] = kDatasetVersion;
    header["n_records"] = records.size();
    header["samples_per_record"] = records.empty() ? 0 : records.front().rss.size();
    header["scenario"] = scenario_to_json(sc);
    header["payload_hash"] =
        fnv1a(reinterpret_cast<const unsigned char*>(payload.data()), payload.size());
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write dataset: " + path);
    out.write(kDatasetMagic, 4);
    write_u32(out, static_cast<std::uint32_t>(header_text.size()));
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw DataError("write failure on dataset: " + path);
}

std::vector<DatasetRecord> load_dataset(const std::string& path, Scenario* scenario_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dataset: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kDatasetMagic, 4) != 0)
        throw DataError(path + ": not a dataset file (bad magic)");
    const std::uint32_t header_len = read_u32(in, path);
    std::string header_text(header_len, '\0');
    if (!in.read(header_text.data(), header_len)) throw DataError(path + ": truncated header");

    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::exception& e) {
        throw DataError(path + ": bad header: " + e.what());
    }
    const auto version = header.at("version").get<std::uint32_t>();
    if (version > kDatasetVersion)
        throw DataError(path + ": unsupported dataset version " + std::to_string(version));
    const auto n_records = header.at("n_records").get<std::size_t>();
    const auto n_samples = header.at("samples_per_record").get<std::size_t>();

    std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t expected = n_records * (16 + 3 * 4 * n_samples);
    if (payload.size() != expected)
        throw DataError(path + ": payload size mismatch (expected " + std::to_string(expected) +
                        " bytes, got " + std::to_string(payload.size()) + ")");
    if (header.contains("payload_hash")) {
        const auto stored = header.at("payload_hash").get<std::uint64_t>();
        const std::uint64_t actual =
            fnv1a(reinterpret_cast<const unsigned char*>(payload.data()), payload.size());
        if (stored != actual) throw DataError(path + ": payload checksum mismatch");
    }

    if (scenario_out) *scenario_out = scenario_from_json(header.at("scenario"));

    std::vector<DatasetRecord> records(n_records);
    std::size_t pos = 0;
    for (DatasetRecord& rec : records) {
        rec.source_x = take_f64(payload, pos, path);
        rec.source_y = take_f64(payload, pos, path);
        rec.rss.resize(n_samples);
        rec.x.resize(n_samples);
        rec.y.resize(n_samples);
        for (std::size_t i = 0; i < n_samples; ++i) rec.rss[i] = take_f32(payload, pos, path);
        for (std::size_t i = 0; i < n_samples; ++i) rec.x[i] = take_f32(payload, pos, path);
        for (std::size_t i = 0; i < n_samples; ++i) rec.y[i] = take_f32(payload, pos, path);
    }
    return records;
}

Scenario load_scenario(const std::string& path, bool apply_env_overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(buf.str(), apply_env_overrides);
}

Scenario scenario_from_json_text(const std::string& text, bool apply_env_overrides) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad scenario config: ") + e.what());
    }
    if (apply_env_overrides) apply_env(j);
    return scenario_from_json(j);
}

std::string scenario_to_json_text(const Scenario& sc) { return scenario_to_json(sc).dump(2); }

}  // namespace rfsim
