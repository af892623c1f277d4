#include "rfsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "rfsim/errors.hpp"
#include "rfsim/rng.hpp"

#include "nn_internal.hpp"

namespace rfsim {

using nlohmann::json;

using nn::Net;
using nn::RunMode;
using nn::Tensor3;
using nn::build_net;

namespace {

Tensor3 make_input_batch(const ModelParams& params, const std::vector<const std::vector<double>*>& rows) {
    const std::size_t len = params.config.input_len;
    Tensor3 x(rows.size(), 1, len);
    const double* mean = params.tensor("input_mean");
    const double* std = params.tensor("input_std");
    for (std::size_t bi = 0; bi < rows.size(); ++bi) {
        if (rows[bi]->size() != len)
            throw NumericError("model input length " + std::to_string(rows[bi]->size()) +
                               " does not match configured " + std::to_string(len));
        for (std::size_t i = 0; i < len; ++i)
            x.at(bi, 0, i) = ((*rows[bi])[i] - mean[i]) / std[i];
    }
    return x;
}

constexpr double kPiLocal = 3.14159265358979323846;
constexpr double kLabelScaleMeters = 1000.0;  // labels optimized in km

double cosine_lr(double lr0, std::size_t epoch, std::size_t epochs) {
    if (epochs <= 1) return lr0;
    const double lr_end = lr0 * 0.01;
    const double t = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
    return lr_end + 0.5 * (lr0 - lr_end) * (1.0 + std::cos(kPiLocal * t));
}

std::uint64_t fnv1a_bytes(const unsigned char* data, std::size_t n) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

void ModelConfig::validate() const {
    if (input_len < 4) throw ConfigError("model config: input length too short");
    if (stem_filters == 0) throw ConfigError("model config: stem_filters must be >= 1");
    if (block_filters.empty()) throw ConfigError("model config: need at least one block");
    if (pool_stride < 1) throw ConfigError("model config: pool stride must be >= 1");
    if (mlp_dims.size() != 4) throw ConfigError("model config: the MLP head has exactly 4 layers");
    if (mlp_dims.back() != 2) throw ConfigError("model config: final MLP width must be 2");
    for (std::size_t d : mlp_dims)
        if (d == 0) throw ConfigError("model config: MLP widths must be positive");
}

ModelConfig ModelConfig::clustering_default(std::size_t n_clusters) {
    ModelConfig cfg;
    cfg.variant = ModelVariant::clustering;
    cfg.input_len = 3 * n_clusters;
    cfg.head = HeadKind::global_average;
    cfg.mlp_dims = {256, 128, 64, 2};
    return cfg;
}

ModelConfig ModelConfig::normalized_default(std::size_t input_len) {
    ModelConfig cfg;
    cfg.variant = ModelVariant::normalized;
    cfg.input_len = input_len;
    cfg.head = HeadKind::flatten;
    cfg.mlp_dims = {40, 64, 32, 2};
    return cfg;
}

const TensorDesc& ModelParams::find(const std::string& name) const {
    for (const TensorDesc& d : layout)
        if (d.name == name) return d;
    throw NumericError("model tensor not found: " + name);
}

double* ModelParams::tensor(const std::string& name) { return values.data() + find(name).offset; }
const double* ModelParams::tensor(const std::string& name) const {
    return values.data() + find(name).offset;
}

ModelParams build_model(const ModelConfig& cfg, std::uint64_t seed) {
    Net net = build_net(cfg);
    ModelParams params;
    params.config = cfg;
    params.layout = net.layout;
    params.values.assign(net.n_net_values, 0.0);
    Rng rng(seed);
    net.init(rng, params.values.data());
    // defaults for the normalization tensors
    double* std = params.tensor("input_std");
    for (std::size_t i = 0; i < cfg.input_len; ++i) std[i] = 1.0;
    params.tensor("label_scale")[0] = 1.0;
    return params;
}

std::vector<std::array<double, 2>> forward_batch(const ModelParams& params,
                                                 const std::vector<std::vector<double>>& inputs) {
    Net net = build_net(params.config);
    if (net.n_net_values != params.values.size())
        throw NumericError("model parameters do not match their configuration");
    std::vector<std::array<double, 2>> out;
    out.reserve(inputs.size());
    const double* center = params.tensor("label_center");
    const double scale = params.tensor("label_scale")[0];
    // Inference never writes to the parameter store.
    double* p = const_cast<double*>(params.values.data());

    constexpr std::size_t kChunk = 256;
    for (std::size_t start = 0; start < inputs.size(); start += kChunk) {
        const std::size_t end = std::min(inputs.size(), start + kChunk);
        std::vector<const std::vector<double>*> rows;
        rows.reserve(end - start);
        for (std::size_t i = start; i < end; ++i) rows.push_back(&inputs[i]);
        Tensor3 y = net.forward(make_input_batch(params, rows), p, RunMode::inference);
        for (std::size_t bi = 0; bi < y.b; ++bi)
            out.push_back({y.at(bi, 0, 0) * scale + center[0], y.at(bi, 1, 0) * scale + center[1]});
    }
    return out;
}

std::array<double, 2> forward(const ModelParams& params, const std::vector<double>& input) {
    return forward_batch(params, {input}).front();
}

TrainResult train(ModelParams& params, const TrainingSet& data, const TrainConfig& cfg) {
    const std::size_t n = data.inputs.size();
    if (n == 0) throw ConfigError("train: empty dataset");
    if (data.labels_m.size() != n) throw ConfigError("train: inputs and labels disagree");
    if (cfg.batch_size == 0 || cfg.epochs == 0 || cfg.learning_rate < 0.0 ||
        cfg.weight_decay < 0.0)
        throw ConfigError("train: invalid training configuration");
    if (cfg.split <= 0.0 || cfg.split > 1.0) throw ConfigError("train: split must be in (0, 1]");
    const std::size_t len = params.config.input_len;
    for (const auto& row : data.inputs)
        if (row.size() != len) throw ConfigError("train: input row length mismatch");

    Net net = build_net(params.config);
    if (net.n_net_values != params.values.size())
        throw NumericError("train: parameters do not match their configuration");

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);

    std::size_t n_train = static_cast<std::size_t>(std::llround(cfg.split * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n);
    const std::size_t n_val = n - n_train;

    // Per-position input standardization from the training split.
    std::vector<double> mean(len, 0.0), stdev(len, 0.0);
    for (std::size_t t = 0; t < n_train; ++t) {
        const auto& row = data.inputs[order[t]];
        for (std::size_t i = 0; i < len; ++i) mean[i] += row[i];
    }
    for (double& m : mean) m /= static_cast<double>(n_train);
    for (std::size_t t = 0; t < n_train; ++t) {
        const auto& row = data.inputs[order[t]];
        for (std::size_t i = 0; i < len; ++i) {
            const double d = row[i] - mean[i];
            stdev[i] += d * d;
        }
    }
    for (double& s : stdev) s = std::max(std::sqrt(s / static_cast<double>(n_train)), 1e-8);
    std::copy(mean.begin(), mean.end(), params.tensor("input_mean"));
    std::copy(stdev.begin(), stdev.end(), params.tensor("input_std"));

    double* center = params.tensor("label_center");
    double scale;
    if (params.config.center_labels) {
        double cx = 0.0, cy = 0.0;
        for (std::size_t t = 0; t < n_train; ++t) {
            cx += data.labels_m[order[t]][0];
            cy += data.labels_m[order[t]][1];
        }
        center[0] = cx / static_cast<double>(n_train);
        center[1] = cy / static_cast<double>(n_train);
        scale = kLabelScaleMeters;
    } else {
        center[0] = center[1] = 0.0;
        scale = 1.0;
    }
    params.tensor("label_scale")[0] = scale;

    const std::size_t n_values = params.values.size();
    std::vector<double> grads(n_values, 0.0);
    std::vector<double> adam_m(n_values, 0.0), adam_v(n_values, 0.0);
    std::vector<char> trainable(n_values, 0);
    std::vector<char> decayed(n_values, 0);
    for (const TensorDesc& d : params.layout) {
        if (!d.trainable) continue;
        std::fill_n(trainable.begin() + static_cast<std::ptrdiff_t>(d.offset), d.numel(), char(1));
        // weight matrices only; biases and normalization affines are exempt
        if (d.name.size() > 2 && d.name.compare(d.name.size() - 2, 2, ".w") == 0)
            std::fill_n(decayed.begin() + static_cast<std::ptrdiff_t>(d.offset), d.numel(), char(1));
    }

    constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
    std::uint64_t step = 0;

    TrainResult result;
    result.train_loss_m2.reserve(cfg.epochs);
    result.val_loss_m2.reserve(cfg.epochs);

    std::vector<double> best_values;
    double best_val = std::numeric_limits<double>::infinity();

    std::vector<std::size_t> train_idx(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double lr = cosine_lr(cfg.learning_rate, epoch, cfg.epochs);
        for (std::size_t i = n_train; i > 1; --i)
            std::swap(train_idx[i - 1], train_idx[rng.uniform_index(i)]);

        double epoch_sq_sum = 0.0;
        for (std::size_t start = 0; start < n_train; start += cfg.batch_size) {
            const std::size_t end = std::min(n_train, start + cfg.batch_size);
            const std::size_t bsz = end - start;
            std::vector<const std::vector<double>*> rows;
            rows.reserve(bsz);
            for (std::size_t i = start; i < end; ++i) rows.push_back(&data.inputs[train_idx[i]]);
            Tensor3 x = make_input_batch(params, rows);
            Tensor3 y = net.forward(std::move(x), params.values.data(), RunMode::train);

            double batch_sq = 0.0;
            Tensor3 dy(y.b, y.c, y.l);
            for (std::size_t bi = 0; bi < bsz; ++bi) {
                const auto& lab = data.labels_m[train_idx[start + bi]];
                for (std::size_t ci = 0; ci < 2; ++ci) {
                    const double target = (lab[ci] - center[ci]) / scale;
                    const double diff = y.at(bi, ci, 0) - target;
                    batch_sq += diff * diff;
                    dy.at(bi, ci, 0) = 2.0 * diff / static_cast<double>(bsz);
                }
            }
            const double batch_loss = batch_sq / static_cast<double>(bsz);
            if (!std::isfinite(batch_loss))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(start / cfg.batch_size));
            epoch_sq_sum += batch_sq;

            std::fill(grads.begin(), grads.end(), 0.0);
            net.backward(std::move(dy), params.values.data(), grads.data());

            ++step;
            const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
            for (std::size_t i = 0; i < n_values; ++i) {
                if (!trainable[i]) continue;
                adam_m[i] = kBeta1 * adam_m[i] + (1.0 - kBeta1) * grads[i];
                adam_v[i] = kBeta2 * adam_v[i] + (1.0 - kBeta2) * grads[i] * grads[i];
                const double mhat = adam_m[i] / bc1;
                const double vhat = adam_v[i] / bc2;
                const double decay = decayed[i] ? cfg.weight_decay * params.values[i] : 0.0;
                params.values[i] -= lr * (mhat / (std::sqrt(vhat) + kAdamEps) + decay);
            }
        }
        result.train_loss_m2.push_back(epoch_sq_sum / static_cast<double>(n_train) * scale * scale);

        if (n_val > 0) {
            std::vector<std::vector<double>> val_inputs;
            val_inputs.reserve(n_val);
            for (std::size_t i = n_train; i < n; ++i) val_inputs.push_back(data.inputs[order[i]]);
            const auto preds = forward_batch(params, val_inputs);
            double sq = 0.0;
            for (std::size_t i = 0; i < n_val; ++i) {
                const auto& lab = data.labels_m[order[n_train + i]];
                const double dx = preds[i][0] - lab[0];
                const double dyv = preds[i][1] - lab[1];
                sq += dx * dx + dyv * dyv;
            }
            const double val_loss = sq / static_cast<double>(n_val);
            result.val_loss_m2.push_back(val_loss);
            if (cfg.restore_best_val && val_loss < best_val) {
                best_val = val_loss;
                best_values = params.values;
            }
        } else {
            result.val_loss_m2.push_back(std::numeric_limits<double>::quiet_NaN());
        }
    }
    if (!best_values.empty()) params.values = std::move(best_values);
    return result;
}

double gradient_check(const ModelParams& params, const std::vector<double>& input,
                      const std::array<double, 2>& label_m, std::size_t n_coords, double step,
                      std::uint64_t seed) {
    Net net = build_net(params.config);
    if (net.n_net_values != params.values.size())
        throw NumericError("gradient_check: parameters do not match their configuration");

    std::vector<double> values = params.values;
    const double* center = params.tensor("label_center");
    const double scale = params.tensor("label_scale")[0];
    const std::array<double, 2> target = {(label_m[0] - center[0]) / scale,
                                          (label_m[1] - center[1]) / scale};

    ModelParams scratch = params;
    auto loss_of = [&](std::vector<double>& v) {
        scratch.values = v;  // stats tensors travel along unchanged
        std::vector<const std::vector<double>*> rows{&input};
        Tensor3 x = make_input_batch(scratch, rows);
        Tensor3 y = net.forward(std::move(x), v.data(), RunMode::train_frozen);
        double sq = 0.0;
        for (std::size_t ci = 0; ci < 2; ++ci) {
            const double diff = y.at(0, ci, 0) - target[ci];
            sq += diff * diff;
        }
        return sq;
    };

    // Analytic gradient at the current point.
    std::vector<double> grads(values.size(), 0.0);
    {
        scratch.values = values;
        std::vector<const std::vector<double>*> rows{&input};
        Tensor3 x = make_input_batch(scratch, rows);
        Tensor3 y = net.forward(std::move(x), values.data(), RunMode::train_frozen);
        Tensor3 dy(1, y.c, 1);
        for (std::size_t ci = 0; ci < 2; ++ci)
            dy.at(0, ci, 0) = 2.0 * (y.at(0, ci, 0) - target[ci]);
        net.backward(std::move(dy), values.data(), grads.data());
    }

    std::vector<std::size_t> trainable_idx;
    for (const TensorDesc& d : params.layout)
        if (d.trainable)
            for (std::size_t i = 0; i < d.numel(); ++i) trainable_idx.push_back(d.offset + i);

    Rng rng(seed);
    for (std::size_t i = trainable_idx.size(); i > 1; --i)
        std::swap(trainable_idx[i - 1], trainable_idx[rng.uniform_index(i)]);
    const std::size_t m = std::min(n_coords, trainable_idx.size());

    double max_rel = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = trainable_idx[j];
        const double orig = values[i];
        values[i] = orig + step;
        const double lp = loss_of(values);
        values[i] = orig - step;
        const double lm = loss_of(values);
        values[i] = orig;
        const double numeric = (lp - lm) / (2.0 * step);
        const double rel = std::abs(grads[i] - numeric) /
                           std::max({std::abs(grads[i]), std::abs(numeric), 1e-3});
        max_rel = std::max(max_rel, rel);
    }
    return max_rel;
}

ComplexityReport count_complexity(const ModelConfig& cfg) {
    Net net = build_net(cfg);
    ComplexityReport rep;
    std::size_t c = 1, l = cfg.input_len;
    for (auto& layer : net.layers) layer->complexity(c, l, rep.parameter_count, rep.flop_count);
    rep.flop_count *= 2;  // 1 MAC = 2 FLOPs
    return rep;
}

namespace {

constexpr char kModelMagic[4] = {'R', 'F', 'N', 'N'};
constexpr std::uint32_t kModelVersion = 1;

json config_to_json(const ModelConfig& cfg) {
    return json{{"variant", cfg.variant == ModelVariant::clustering ? "clustering" : "normalized"},
                {"input_len", cfg.input_len},
                {"stem_filters", cfg.stem_filters},
                {"block_filters", cfg.block_filters},
                {"pool_stride", cfg.pool_stride},
                {"head", cfg.head == HeadKind::global_average ? "global_average" : "flatten"},
                {"mlp_dims", cfg.mlp_dims},
                {"center_labels", cfg.center_labels}};
}

ModelConfig config_from_json(const json& j) {
    ModelConfig cfg;
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "clustering") cfg.variant = ModelVariant::clustering;
    else if (variant == "normalized") cfg.variant = ModelVariant::normalized;
    else throw DataError("model file: unknown variant " + variant);
    cfg.input_len = j.at("input_len").get<std::size_t>();
    cfg.stem_filters = j.at("stem_filters").get<std::size_t>();
    cfg.block_filters = j.at("block_filters").get<std::vector<std::size_t>>();
    cfg.pool_stride = j.at("pool_stride").get<std::size_t>();
    const std::string head = j.at("head").get<std::string>();
    if (head == "global_average") cfg.head = HeadKind::global_average;
    else if (head == "flatten") cfg.head = HeadKind::flatten;
    else throw DataError("model file: unknown head " + head);
    cfg.mlp_dims = j.at("mlp_dims").get<std::vector<std::size_t>>();
    cfg.center_labels = j.at("center_labels").get<bool>();
    return cfg;
}

}  // namespace

void save_model(const ModelParams& params, const std::string& path) {
    std::string payload;
    payload.reserve(params.values.size() * 4);
    for (double v : params.values) {
        const float f = static_cast<float>(v);
        std::uint32_t u;
        std::memcpy(&u, &f, 4);
        for (int i = 0; i < 4; ++i) payload.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
    }

    json layout = json::array();
    for (const TensorDesc& d : params.layout)
        layout.push_back(json{{"name", d.name}, {"shape", d.shape}, {"offset", d.offset},
                              {"trainable", d.trainable}});

    json header;
    header["version"] = kModelVersion;
    header["config"] = config_to_json(params.config);
    header["layout"] = layout;
    header["n_values"] = params.values.size();
    header["data_hash"] = fnv1a_bytes(reinterpret_cast<const unsigned char*>(payload.data()),
                                      payload.size());
    const std::string header_text = header.dump();

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model file: " + path);
    out.write(kModelMagic, 4);
    const std::uint32_t hlen = static_cast<std::uint32_t>(header_text.size());
    const unsigned char lb[4] = {static_cast<unsigned char>(hlen), static_cast<unsigned char>(hlen >> 8),
                                 static_cast<unsigned char>(hlen >> 16),
                                 static_cast<unsigned char>(hlen >> 24)};
    out.write(reinterpret_cast<const char*>(lb), 4);
    out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    if (!out) throw DataError("write failure on model file: " + path);
}

ModelParams load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model file: " + path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0)
        throw DataError(path + ": not a model file (bad magic)");
    unsigned char lb[4];
    if (!in.read(reinterpret_cast<char*>(lb), 4)) throw DataError(path + ": truncated header");
    const std::uint32_t hlen = static_cast<std::uint32_t>(lb[0]) |
                               (static_cast<std::uint32_t>(lb[1]) << 8) |
                               (static_cast<std::uint32_t>(lb[2]) << 16) |
                               (static_cast<std::uint32_t>(lb[3]) << 24);
    std::string header_text(hlen, '\0');
    if (!in.read(header_text.data(), hlen)) throw DataError(path + ": truncated header");

    json header;
    try {
        header = json::parse(header_text);
    } catch (const json::exception& e) {
        throw DataError(path + ": bad model header: " + e.what());
    }
    if (header.at("version").get<std::uint32_t>() > kModelVersion)
        throw DataError(path + ": unsupported model version");

    ModelParams params;
    params.config = config_from_json(header.at("config"));

    // The layout stored in the file must match the architecture implied by
    // the stored config; a mismatch means the file was assembled from
    // incompatible pieces.
    Net net = build_net(params.config);
    const json& stored = header.at("layout");
    if (stored.size() != net.layout.size())
        throw DataError(path + ": model layout does not match its configuration");
    for (std::size_t i = 0; i < net.layout.size(); ++i) {
        const TensorDesc& d = net.layout[i];
        if (stored[i].at("name").get<std::string>() != d.name ||
            stored[i].at("shape").get<std::vector<std::size_t>>() != d.shape ||
            stored[i].at("offset").get<std::size_t>() != d.offset)
            throw DataError(path + ": model layout does not match its configuration (tensor " +
                            d.name + ")");
    }
    params.layout = net.layout;

    const auto n_values = header.at("n_values").get<std::size_t>();
    if (n_values != net.n_net_values)
        throw DataError(path + ": model size does not match its configuration");

    std::string payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (payload.size() != n_values * 4) throw DataError(path + ": truncated model payload");
    if (header.contains("data_hash")) {
        const auto stored_hash = header.at("data_hash").get<std::uint64_t>();
        if (stored_hash != fnv1a_bytes(reinterpret_cast<const unsigned char*>(payload.data()),
                                       payload.size()))
            throw DataError(path + ": model payload checksum mismatch");
    }
    params.values.resize(n_values);
    for (std::size_t i = 0; i < n_values; ++i) {
        std::uint32_t u = 0;
        for (int b = 0; b < 4; ++b)
            u |= static_cast<std::uint32_t>(static_cast<unsigned char>(payload[i * 4 + b])) << (8 * b);
        float f;
        std::memcpy(&f, &u, 4);
        params.values[i] = static_cast<double>(f);
    }
    return params;
}

void save_loss_curve_csv(const TrainResult& result, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write loss curve: " + path);
    out << "epoch,train_loss,val_loss\n";
    out.precision(12);
    for (std::size_t e = 0; e < result.train_loss_m2.size(); ++e) {
        out << e << "," << result.train_loss_m2[e] << ",";
        if (e < result.val_loss_m2.size() && std::isfinite(result.val_loss_m2[e]))
            out << result.val_loss_m2[e];
        out << "\n";
    }
}

}  // namespace rfsim
