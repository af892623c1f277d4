#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rfsim/errors.hpp"
#include "rfsim/harness.hpp"
#include "rfsim/parallel.hpp"

namespace py = pybind11;
using namespace rfsim;

namespace {

Scenario scenario_from_json_or_default(const std::string& json_text) {
    if (json_text.empty()) return finalize_scenario(Scenario{});
    return finalize_scenario(scenario_from_json_text(json_text));
}

}  // namespace

PYBIND11_MODULE(_rfsim, m) {
    m.doc() = "UAV air-to-ground RSS simulation and RF source localization";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<DataError>(m, "DataError");
    py::register_exception<NumericError>(m, "NumericError");

    // geometry -----------------------------------------------------------
    py::class_<AttitudeAngles>(m, "AttitudeAngles")
        .def(py::init<double, double, double>(), py::arg("roll") = 0.0, py::arg("pitch") = 0.0,
             py::arg("yaw") = 0.0)
        .def_static("from_degrees", &AttitudeAngles::from_degrees)
        .def_readwrite("roll", &AttitudeAngles::roll)
        .def_readwrite("pitch", &AttitudeAngles::pitch)
        .def_readwrite("yaw", &AttitudeAngles::yaw);

    py::class_<SphericalDirection>(m, "SphericalDirection")
        .def(py::init<double, double>(), py::arg("theta") = 0.0, py::arg("phi") = 0.0)
        .def_static("from_degrees", &SphericalDirection::from_degrees)
        .def_readwrite("theta", &SphericalDirection::theta)
        .def_readwrite("phi", &SphericalDirection::phi);

    m.def("rotation_matrix", [](const AttitudeAngles& att) {
        const Mat3 r = rotation_matrix(att);
        std::vector<std::vector<double>> rows(3, std::vector<double>(3));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) rows[i][j] = r(i, j);
        return rows;
    });
    m.def("direction_from_angles", [](const SphericalDirection& d) {
        const Vec3 v = direction_from_angles(d);
        return std::vector<double>{v.x, v.y, v.z};
    });
    m.def("angles_from_direction", [](double x, double y, double z) {
        return angles_from_direction({x, y, z});
    });
    m.def("rotate_direction", &rotate_direction);

    // antenna --------------------------------------------------------------
    py::class_<AntennaPattern>(m, "AntennaPattern")
        .def_static("dipole", &AntennaPattern::dipole, py::arg("g_max") = kDipolePeakGain)
        .def_static("isotropic", &AntennaPattern::isotropic, py::arg("gain_dbi") = 0.0)
        .def_static("gridded", &AntennaPattern::gridded)
        .def("gain", &AntennaPattern::gain);
    m.def("dipole_gain", &dipole_gain, py::arg("theta"), py::arg("g_max") = kDipolePeakGain);
    m.def("load_pattern", &load_pattern);
    m.def("pattern_gain", &pattern_gain);

    // propagation -----------------------------------------------------------
    py::class_<Position>(m, "Position")
        .def(py::init<double, double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0,
             py::arg("z") = 0.0)
        .def_readwrite("x", &Position::x)
        .def_readwrite("y", &Position::y)
        .def_readwrite("z", &Position::z);

    py::class_<LinkGeometry>(m, "LinkGeometry")
        .def_readonly("d_2d", &LinkGeometry::d_2d)
        .def_readonly("d_los", &LinkGeometry::d_los)
        .def_readonly("d_refl", &LinkGeometry::d_refl)
        .def_readonly("theta_los", &LinkGeometry::theta_los)
        .def_readonly("theta_refl", &LinkGeometry::theta_refl)
        .def_readonly("phi_los", &LinkGeometry::phi_los)
        .def_readonly("phi_refl", &LinkGeometry::phi_refl)
        .def_readonly("delta_phase", &LinkGeometry::delta_phase);

    py::enum_<Polarization>(m, "Polarization")
        .value("vertical", Polarization::vertical)
        .value("horizontal", Polarization::horizontal);

    py::class_<ShadowModel>(m, "ShadowModel")
        .def(py::init<>())
        .def_readwrite("leg_azimuths_deg", &ShadowModel::leg_azimuths_deg)
        .def_readwrite("angular_spread_deg", &ShadowModel::angular_spread_deg)
        .def_readwrite("elevation_threshold_deg", &ShadowModel::elevation_threshold_deg)
        .def_readwrite("beta", &ShadowModel::beta)
        .def_readwrite("d0", &ShadowModel::d0);

    py::class_<PropagationParams>(m, "PropagationParams")
        .def(py::init<>())
        .def_readwrite("p_t_dbm", &PropagationParams::p_t_dbm)
        .def_readwrite("f_c_hz", &PropagationParams::f_c_hz)
        .def_readwrite("epsilon_r", &PropagationParams::epsilon_r)
        .def_readwrite("polarization", &PropagationParams::polarization)
        .def_readwrite("tx_pattern", &PropagationParams::tx_pattern)
        .def_readwrite("rx_pattern", &PropagationParams::rx_pattern)
        .def_readwrite("shadow", &PropagationParams::shadow);

    m.def("link_geometry", &link_geometry);
    m.def("fspl_rss", &fspl_rss, py::arg("params"), py::arg("tx"), py::arg("rx"),
          py::arg("att") = std::nullopt);
    m.def("reflection_coefficient", &reflection_coefficient);
    m.def("two_ray_rss", &two_ray_rss, py::arg("params"), py::arg("tx"), py::arg("rx"),
          py::arg("att") = std::nullopt);
    m.def("is_shadowed", &is_shadowed);
    m.def("shadow_loss", &shadow_loss);
    m.def("enhanced_two_ray_rss", &enhanced_two_ray_rss);
    m.def("fit_beta", &fit_beta);

    // flight ----------------------------------------------------------------
    py::class_<Rect>(m, "Rect")
        .def(py::init<double, double, double, double>(), py::arg("x0") = 0.0, py::arg("x1") = 0.0,
             py::arg("y0") = 0.0, py::arg("y1") = 0.0)
        .def_readwrite("x0", &Rect::x0)
        .def_readwrite("x1", &Rect::x1)
        .def_readwrite("y0", &Rect::y0)
        .def_readwrite("y1", &Rect::y1);

    py::class_<Waypoint>(m, "Waypoint")
        .def_readonly("x", &Waypoint::x)
        .def_readonly("y", &Waypoint::y);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("waypoints", &Trajectory::waypoints)
        .def_readonly("altitude", &Trajectory::altitude)
        .def("path_length", &Trajectory::path_length);

    py::class_<FlightSample>(m, "FlightSample")
        .def_readonly("t", &FlightSample::t)
        .def_readonly("x", &FlightSample::x)
        .def_readonly("y", &FlightSample::y)
        .def_readonly("z", &FlightSample::z)
        .def_readonly("att", &FlightSample::att);

    py::class_<FlightLog>(m, "FlightLog").def_readonly("samples", &FlightLog::samples);

    m.def("spiral_trajectory", &spiral_trajectory);
    m.def("lawnmower_trajectory", &lawnmower_trajectory);
    m.def("sample_flight", &sample_flight);

    // scenario / dataset -----------------------------------------------------
    py::class_<DatasetRecord>(m, "DatasetRecord")
        .def_readonly("source_x", &DatasetRecord::source_x)
        .def_readonly("source_y", &DatasetRecord::source_y)
        .def_readonly("rss", &DatasetRecord::rss)
        .def_readonly("x", &DatasetRecord::x)
        .def_readonly("y", &DatasetRecord::y);

    py::class_<Scenario>(m, "Scenario").def(py::init<>());
    m.def("scenario_from_json", &scenario_from_json_or_default, py::arg("json_text") = "");
    m.def("scenario_to_json", &scenario_to_json_text);
    m.def(
        "generate_dataset",
        [](const std::string& scenario_json, std::size_t n_records, std::uint64_t seed) {
            return generate_dataset(scenario_from_json_or_default(scenario_json), n_records, seed,
                                    default_workers());
        },
        py::arg("scenario_json"), py::arg("n_records"), py::arg("seed"));
    m.def("save_dataset", [](const std::vector<DatasetRecord>& records,
                             const std::string& scenario_json, const std::string& path) {
        save_dataset(records, scenario_from_json_or_default(scenario_json), path);
    });
    m.def("load_dataset", [](const std::string& path) { return load_dataset(path); });

    // features ----------------------------------------------------------------
    py::class_<PreprocessConfig>(m, "PreprocessConfig")
        .def(py::init<>())
        .def_readwrite("group_size", &PreprocessConfig::group_size)
        .def_readwrite("sigma", &PreprocessConfig::sigma);

    py::class_<ClusterConfig>(m, "ClusterConfig")
        .def(py::init<>())
        .def_readwrite("n_clusters", &ClusterConfig::n_clusters)
        .def_readwrite("top_n", &ClusterConfig::top_n)
        .def_readwrite("max_iters", &ClusterConfig::max_iters)
        .def_readwrite("seed", &ClusterConfig::seed);

    m.def("group_average", &group_average);
    m.def("gaussian_kernel", &gaussian_kernel);
    m.def("smooth", &smooth);
    m.def("normalize_rss",
          [](const std::vector<double>& v, const std::string& mode) {
              return normalize_rss(
                  v, mode == "minmax" ? Normalization::minmax : Normalization::zscore);
          },
          py::arg("values"), py::arg("mode") = "zscore");
    m.def("extract_features",
          [](const std::vector<double>& x, const std::vector<double>& y,
             const std::vector<double>& rss, const PreprocessConfig& pre,
             const ClusterConfig& cluster) {
              return extract_features(x, y, rss, pre, cluster).values;
          });
    m.def("normalized_input", &normalized_input);

    // model ---------------------------------------------------------------------
    py::enum_<HeadKind>(m, "HeadKind")
        .value("global_average", HeadKind::global_average)
        .value("flatten", HeadKind::flatten);

    py::class_<ModelConfig>(m, "ModelConfig")
        .def_static("clustering_default", &ModelConfig::clustering_default,
                    py::arg("n_clusters") = 20)
        .def_static("normalized_default", &ModelConfig::normalized_default,
                    py::arg("input_len") = 10000)
        .def_readwrite("input_len", &ModelConfig::input_len)
        .def_readwrite("stem_filters", &ModelConfig::stem_filters)
        .def_readwrite("block_filters", &ModelConfig::block_filters)
        .def_readwrite("mlp_dims", &ModelConfig::mlp_dims)
        .def_readwrite("pool_stride", &ModelConfig::pool_stride)
        .def_readwrite("head", &ModelConfig::head)
        .def_readwrite("center_labels", &ModelConfig::center_labels);

    py::class_<ModelParams>(m, "ModelParams");

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("split", &TrainConfig::split)
        .def_readwrite("weight_decay", &TrainConfig::weight_decay)
        .def_readwrite("restore_best_val", &TrainConfig::restore_best_val);

    py::class_<TrainResult>(m, "TrainResult")
        .def_readonly("train_loss_m2", &TrainResult::train_loss_m2)
        .def_readonly("val_loss_m2", &TrainResult::val_loss_m2);

    py::class_<ComplexityReport>(m, "ComplexityReport")
        .def_readonly("parameter_count", &ComplexityReport::parameter_count)
        .def_readonly("flop_count", &ComplexityReport::flop_count);

    m.def("build_model", &build_model);
    m.def("forward", &forward);
    m.def("train",
          [](ModelParams& params, const std::vector<std::vector<double>>& inputs,
             const std::vector<std::array<double, 2>>& labels, const TrainConfig& cfg) {
              TrainingSet data;
              data.inputs = inputs;
              data.labels_m = labels;
              return train(params, data, cfg);
          });
    m.def("gradient_check", &gradient_check, py::arg("params"), py::arg("input"), py::arg("label"),
          py::arg("n_coords") = 256, py::arg("step") = 1e-4, py::arg("seed") = 1);
    m.def("count_complexity", &count_complexity);
    m.def("save_model", &save_model);
    m.def("load_model", &load_model);

    // harness --------------------------------------------------------------------
    m.def("positioning_error", &positioning_error);
    m.def("argmax_rss_estimate", &argmax_rss_estimate);
    m.def(
        "evaluate_localizer",
        [](const ModelParams& model, const std::vector<DatasetRecord>& records,
           const PreprocessConfig& pre, const ClusterConfig& cluster) {
            const EvalReport rep = evaluate_localizer(model, records, pre, cluster,
                                                      default_workers());
            std::vector<double> errors;
            for (const auto& t : rep.trials) errors.push_back(t.error_m);
            return std::make_pair(rep.mean_error_m, errors);
        });
}
