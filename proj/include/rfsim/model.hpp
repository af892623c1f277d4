#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace rfsim {

enum class ModelVariant { clustering, normalized };
enum class HeadKind { global_average, flatten };

// RealAdaptRNet configuration: conv stem, residual conv blocks with average
// pooling, then a 4-layer MLP head emitting (x, y).
struct ModelConfig {
    ModelVariant variant = ModelVariant::clustering;
    std::size_t input_len = 60;
    std::size_t stem_filters = 32;
    std::vector<std::size_t> block_filters = {32, 64, 128};
    std::size_t pool_stride = 2;
    HeadKind head = HeadKind::global_average;
    std::vector<std::size_t> mlp_dims = {256, 128, 64, 2};
    bool center_labels = true;

    static ModelConfig clustering_default(std::size_t n_clusters = 20);
    static ModelConfig normalized_default(std::size_t input_len = 10000);
    void validate() const;
};

struct TensorDesc {
    std::string name;
    std::vector<std::size_t> shape;
    std::size_t offset = 0;
    bool trainable = true;

    std::size_t numel() const {
        std::size_t n = 1;
        for (std::size_t d : shape) n *= d;
        return n;
    }
};

// Flattened weights, biases and normalization statistics, described by a
// stable layout so files and gradients can address them by name.
struct ModelParams {
    ModelConfig config;
    std::vector<TensorDesc> layout;
    std::vector<double> values;

    const TensorDesc& find(const std::string& name) const;
    double* tensor(const std::string& name);
    const double* tensor(const std::string& name) const;
};

struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 32;
    std::size_t epochs = 100;
    std::uint64_t seed = 0;
    double split = 0.9;          // train fraction
    // Decoupled decay on weight matrices (norm affines and biases exempt),
    // scaled by the current rate. The default looks large next to common
    // long-schedule values because training budgets here are a few thousand
    // steps; the integrated contraction is what matters.
    double weight_decay = 3.0;
    bool restore_best_val = true;
};

struct TrainingSet {
    std::vector<std::vector<double>> inputs;
    std::vector<std::array<double, 2>> labels_m;  // meters
};

// Per-epoch mean squared Euclidean error on the 2D estimate, in m^2.
// val entries are NaN when the validation split is empty.
struct TrainResult {
    std::vector<double> train_loss_m2;
    std::vector<double> val_loss_m2;
};

struct ComplexityReport {
    std::uint64_t parameter_count = 0;  // trainable parameters
    std::uint64_t flop_count = 0;       // 2 * MACs of conv/linear layers, one forward pass
};

// Seeded fan-in-scaled initialization of every layer in the configured
// architecture.
ModelParams build_model(const ModelConfig& cfg, std::uint64_t seed);

// Inference-mode forward pass; returns the 2D estimate in meters.
std::array<double, 2> forward(const ModelParams& params, const std::vector<double>& input);
std::vector<std::array<double, 2>> forward_batch(const ModelParams& params,
                                                 const std::vector<std::vector<double>>& inputs);

// Adam with decoupled weight decay on MSE over (x, y). Splits off a
// validation set, standardizes inputs per position, optionally centers
// labels (kilometer scale internally), and decays the learning rate on a
// cosine schedule. When a validation split exists the parameters from the
// best validation epoch are restored at the end. Deterministic per seed.
TrainResult train(ModelParams& params, const TrainingSet& data, const TrainConfig& cfg);

// Max relative error between analytic gradients and central finite
// differences over a seeded subset of trainable coordinates. Runs the same
// training-mode loss both ways (running statistics frozen).
double gradient_check(const ModelParams& params, const std::vector<double>& input,
                      const std::array<double, 2>& label_m, std::size_t n_coords = 256,
                      double step = 1e-4, std::uint64_t seed = 1);

ComplexityReport count_complexity(const ModelConfig& cfg);

// Self-describing binary: JSON header (config, layout, payload hash) then
// raw little-endian float32 values. Loading verifies the layout against the
// architecture rebuilt from the embedded config.
void save_model(const ModelParams& params, const std::string& path);
ModelParams load_model(const std::string& path);

void save_loss_curve_csv(const TrainResult& result, const std::string& path);

}  // namespace rfsim
