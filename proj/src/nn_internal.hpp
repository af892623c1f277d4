// Internal layer framework for the 1D conv-residual regressor. Lives in a
// source-tree header so the unit tests can drive single layers directly.
#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rfsim/errors.hpp"
#include "rfsim/model.hpp"
#include "rfsim/rng.hpp"

namespace rfsim::nn {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.9;

enum class RunMode { inference, train, train_frozen };

struct Tensor3 {
    std::size_t b = 0, c = 0, l = 0;
    std::vector<double> v;

    Tensor3() = default;
    Tensor3(std::size_t b_, std::size_t c_, std::size_t l_) : b(b_), c(c_), l(l_), v(b_ * c_ * l_, 0.0) {}
    double& at(std::size_t bi, std::size_t ci, std::size_t xi) { return v[(bi * c + ci) * l + xi]; }
    double at(std::size_t bi, std::size_t ci, std::size_t xi) const { return v[(bi * c + ci) * l + xi]; }
    double* row(std::size_t bi, std::size_t ci) { return &v[(bi * c + ci) * l]; }
    const double* row(std::size_t bi, std::size_t ci) const { return &v[(bi * c + ci) * l]; }
};

class ParamAllocator {
  public:
    std::size_t add(std::vector<TensorDesc>& layout, const std::string& name,
                    std::vector<std::size_t> shape, bool trainable) {
        TensorDesc d;
        d.name = name;
        d.shape = std::move(shape);
        d.offset = next_;
        d.trainable = trainable;
        next_ += d.numel();
        layout.push_back(std::move(d));
        return layout.back().offset;
    }
    std::size_t total() const { return next_; }

  private:
    std::size_t next_ = 0;
};

class Layer {
  public:
    virtual ~Layer() = default;
    virtual void init(Rng&, double*) {}
    virtual Tensor3 forward(const Tensor3& x, double* p, RunMode mode) = 0;
    virtual Tensor3 backward(const Tensor3& dy, const double* p, double* g) = 0;
    // Tracks (channels, length) through the layer and accumulates trainable
    // parameter and conv/linear MAC counts.
    virtual void complexity(std::size_t& c, std::size_t& l, std::uint64_t& params,
                            std::uint64_t& macs) const = 0;
};

class Conv1d final : public Layer {
  public:
    Conv1d(ParamAllocator& alloc, std::vector<TensorDesc>& layout, const std::string& name,
           std::size_t c_in, std::size_t c_out, std::size_t k, std::size_t stride, std::size_t pad)
        : c_in_(c_in), c_out_(c_out), k_(k), stride_(stride), pad_(pad) {
        w_ = alloc.add(layout, name + ".w", {c_out, c_in, k}, true);
        b_ = alloc.add(layout, name + ".b", {c_out}, true);
        name_ = name;
    }

    std::size_t out_len(std::size_t l) const {
        if (l + 2 * pad_ < k_)
            throw ConfigError("conv layer " + name_ + ": input length " + std::to_string(l) +
                              " shorter than kernel");
        return (l + 2 * pad_ - k_) / stride_ + 1;
    }

    void init(Rng& rng, double* p) override {
        const double scale = std::sqrt(2.0 / static_cast<double>(c_in_ * k_));
        for (std::size_t i = 0; i < c_out_ * c_in_ * k_; ++i) p[w_ + i] = rng.normal(0.0, scale);
        for (std::size_t i = 0; i < c_out_; ++i) p[b_ + i] = 0.0;
    }

    Tensor3 forward(const Tensor3& x, double* p, RunMode) override {
        x_ = x;
        const std::size_t lo = out_len(x.l);
        Tensor3 y(x.b, c_out_, lo);
        const double* w = p + w_;
        const double* bias = p + b_;
        for (std::size_t bi = 0; bi < x.b; ++bi)
            for (std::size_t co = 0; co < c_out_; ++co) {
                double* yrow = &y.at(bi, co, 0);
                for (std::size_t xo = 0; xo < lo; ++xo) yrow[xo] = bias[co];
                for (std::size_t ci = 0; ci < c_in_; ++ci) {
                    const double* xrow = &x_.at(bi, ci, 0);
                    const double* wrow = w + (co * c_in_ + ci) * k_;
                    for (std::size_t kk = 0; kk < k_; ++kk) {
                        const double wv = wrow[kk];
                        // input index xi = xo*stride + kk - pad, kept in range
                        const std::ptrdiff_t shift =
                            static_cast<std::ptrdiff_t>(kk) - static_cast<std::ptrdiff_t>(pad_);
                        for (std::size_t xo = 0; xo < lo; ++xo) {
                            const std::ptrdiff_t xi =
                                static_cast<std::ptrdiff_t>(xo * stride_) + shift;
                            if (xi < 0 || xi >= static_cast<std::ptrdiff_t>(x.l)) continue;
                            yrow[xo] += wv * xrow[xi];
                        }
                    }
                }
            }
        return y;
    }

    Tensor3 backward(const Tensor3& dy, const double* p, double* g) override {
        Tensor3 dx(x_.b, x_.c, x_.l);
        const double* w = p + w_;
        for (std::size_t co = 0; co < c_out_; ++co) {
            double* dwrow = g + w_ + co * c_in_ * k_;
            double db = 0.0;
            for (std::size_t bi = 0; bi < dy.b; ++bi) {
                const double* dyrow = dy.row(bi, co);
                for (std::size_t xo = 0; xo < dy.l; ++xo) db += dyrow[xo];
                for (std::size_t ci = 0; ci < c_in_; ++ci) {
                    const double* xrow = &x_.at(bi, ci, 0);
                    for (std::size_t kk = 0; kk < k_; ++kk) {
                        const std::ptrdiff_t shift =
                            static_cast<std::ptrdiff_t>(kk) - static_cast<std::ptrdiff_t>(pad_);
                        double acc = 0.0;
                        for (std::size_t xo = 0; xo < dy.l; ++xo) {
                            const std::ptrdiff_t xi =
                                static_cast<std::ptrdiff_t>(xo * stride_) + shift;
                            if (xi < 0 || xi >= static_cast<std::ptrdiff_t>(x_.l)) continue;
                            acc += dyrow[xo] * xrow[xi];
                        }
                        dwrow[ci * k_ + kk] += acc;
                    }
                }
            }
            g[b_ + co] += db;
        }
        for (std::size_t bi = 0; bi < dy.b; ++bi)
            for (std::size_t co = 0; co < c_out_; ++co) {
                const double* dyrow = dy.row(bi, co);
                for (std::size_t ci = 0; ci < c_in_; ++ci) {
                    double* dxrow = &dx.at(bi, ci, 0);
                    const double* wrow = w + (co * c_in_ + ci) * k_;
                    for (std::size_t kk = 0; kk < k_; ++kk) {
                        const std::ptrdiff_t shift =
                            static_cast<std::ptrdiff_t>(kk) - static_cast<std::ptrdiff_t>(pad_);
                        const double wv = wrow[kk];
                        for (std::size_t xo = 0; xo < dy.l; ++xo) {
                            const std::ptrdiff_t xi =
                                static_cast<std::ptrdiff_t>(xo * stride_) + shift;
                            if (xi < 0 || xi >= static_cast<std::ptrdiff_t>(x_.l)) continue;
                            dxrow[xi] += wv * dyrow[xo];
                        }
                    }
                }
            }
        return dx;
    }

    void complexity(std::size_t& c, std::size_t& l, std::uint64_t& params,
                    std::uint64_t& macs) const override {
        const std::size_t lo = (l + 2 * pad_ - k_) / stride_ + 1;
        params += static_cast<std::uint64_t>(c_out_) * c_in_ * k_ + c_out_;
        macs += static_cast<std::uint64_t>(k_) * c_in_ * c_out_ * lo;
        c = c_out_;
        l = lo;
    }

  private:
    std::size_t c_in_, c_out_, k_, stride_, pad_;
    std::size_t w_ = 0, b_ = 0;
    std::string name_;
    Tensor3 x_;
};

class BatchNorm1d final : public Layer {
  public:
    BatchNorm1d(ParamAllocator& alloc, std::vector<TensorDesc>& layout, const std::string& name,
                std::size_t c)
        : c_(c) {
        gamma_ = alloc.add(layout, name + ".gamma", {c}, true);
        beta_ = alloc.add(layout, name + ".beta", {c}, true);
        rmean_ = alloc.add(layout, name + ".running_mean", {c}, false);
        rvar_ = alloc.add(layout, name + ".running_var", {c}, false);
    }

    void init(Rng&, double* p) override {
        for (std::size_t i = 0; i < c_; ++i) {
            p[gamma_ + i] = 1.0;
            p[beta_ + i] = 0.0;
            p[rmean_ + i] = 0.0;
            p[rvar_ + i] = 1.0;
        }
    }

    Tensor3 forward(const Tensor3& x, double* p, RunMode mode) override {
        mode_ = mode;
        const std::size_t n = x.b * x.l;
        xhat_ = Tensor3(x.b, x.c, x.l);
        inv_std_.assign(c_, 0.0);
        Tensor3 y(x.b, x.c, x.l);
        for (std::size_t ci = 0; ci < c_; ++ci) {
            double mean, var;
            if (mode == RunMode::inference) {
                mean = p[rmean_ + ci];
                var = p[rvar_ + ci];
            } else {
                double s = 0.0;
                for (std::size_t bi = 0; bi < x.b; ++bi)
                    for (std::size_t xi = 0; xi < x.l; ++xi) s += x.at(bi, ci, xi);
                mean = s / static_cast<double>(n);
                double v2 = 0.0;
                for (std::size_t bi = 0; bi < x.b; ++bi)
                    for (std::size_t xi = 0; xi < x.l; ++xi) {
                        const double d = x.at(bi, ci, xi) - mean;
                        v2 += d * d;
                    }
                var = v2 / static_cast<double>(n);
                if (mode == RunMode::train) {
                    p[rmean_ + ci] = kBnMomentum * p[rmean_ + ci] + (1.0 - kBnMomentum) * mean;
                    p[rvar_ + ci] = kBnMomentum * p[rvar_ + ci] + (1.0 - kBnMomentum) * var;
                }
            }
            const double inv = 1.0 / std::sqrt(var + kBnEps);
            inv_std_[ci] = inv;
            const double ga = p[gamma_ + ci], be = p[beta_ + ci];
            for (std::size_t bi = 0; bi < x.b; ++bi)
                for (std::size_t xi = 0; xi < x.l; ++xi) {
                    const double h = (x.at(bi, ci, xi) - mean) * inv;
                    xhat_.at(bi, ci, xi) = h;
                    y.at(bi, ci, xi) = ga * h + be;
                }
        }
        return y;
    }

    Tensor3 backward(const Tensor3& dy, const double* p, double* g) override {
        const std::size_t n = dy.b * dy.l;
        Tensor3 dx(dy.b, dy.c, dy.l);
        for (std::size_t ci = 0; ci < c_; ++ci) {
            const double ga = p[gamma_ + ci];
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (std::size_t bi = 0; bi < dy.b; ++bi)
                for (std::size_t xi = 0; xi < dy.l; ++xi) {
                    const double d = dy.at(bi, ci, xi);
                    sum_dy += d;
                    sum_dy_xhat += d * xhat_.at(bi, ci, xi);
                }
            g[gamma_ + ci] += sum_dy_xhat;
            g[beta_ + ci] += sum_dy;
            const double inv = inv_std_[ci];
            if (mode_ == RunMode::inference) {
                for (std::size_t bi = 0; bi < dy.b; ++bi)
                    for (std::size_t xi = 0; xi < dy.l; ++xi)
                        dx.at(bi, ci, xi) = dy.at(bi, ci, xi) * ga * inv;
            } else {
                // Batch statistics participate in the gradient.
                const double nn = static_cast<double>(n);
                for (std::size_t bi = 0; bi < dy.b; ++bi)
                    for (std::size_t xi = 0; xi < dy.l; ++xi) {
                        const double d = dy.at(bi, ci, xi);
                        const double h = xhat_.at(bi, ci, xi);
                        dx.at(bi, ci, xi) =
                            ga * inv / nn * (nn * d - sum_dy - h * sum_dy_xhat);
                    }
            }
        }
        return dx;
    }

    void complexity(std::size_t& c, std::size_t&, std::uint64_t& params, std::uint64_t&) const override {
        (void)c;
        params += 2 * static_cast<std::uint64_t>(c_);
    }

  private:
    std::size_t c_;
    std::size_t gamma_ = 0, beta_ = 0, rmean_ = 0, rvar_ = 0;
    Tensor3 xhat_;
    std::vector<double> inv_std_;
    RunMode mode_ = RunMode::inference;
};

class ReLU final : public Layer {
  public:
    Tensor3 forward(const Tensor3& x, double*, RunMode) override {
        Tensor3 y = x;
        for (double& v : y.v) v = v > 0.0 ? v : 0.0;
        y_ = y;
        return y;
    }
    Tensor3 backward(const Tensor3& dy, const double*, double*) override {
        Tensor3 dx = dy;
        for (std::size_t i = 0; i < dx.v.size(); ++i)
            if (y_.v[i] <= 0.0) dx.v[i] = 0.0;
        return dx;
    }
    void complexity(std::size_t&, std::size_t&, std::uint64_t&, std::uint64_t&) const override {}

  private:
    Tensor3 y_;
};

class AvgPool1d final : public Layer {
  public:
    explicit AvgPool1d(std::size_t stride) : p_(stride) {}

    Tensor3 forward(const Tensor3& x, double*, RunMode) override {
        if (x.l < p_) throw ConfigError("avg pool: input length shorter than pool stride");
        in_l_ = x.l;
        const std::size_t lo = x.l / p_;
        Tensor3 y(x.b, x.c, lo);
        const double inv = 1.0 / static_cast<double>(p_);
        for (std::size_t bi = 0; bi < x.b; ++bi)
            for (std::size_t ci = 0; ci < x.c; ++ci)
                for (std::size_t xo = 0; xo < lo; ++xo) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < p_; ++k) s += x.at(bi, ci, xo * p_ + k);
                    y.at(bi, ci, xo) = s * inv;
                }
        return y;
    }

    Tensor3 backward(const Tensor3& dy, const double*, double*) override {
        Tensor3 dx(dy.b, dy.c, in_l_);
        const double inv = 1.0 / static_cast<double>(p_);
        for (std::size_t bi = 0; bi < dy.b; ++bi)
            for (std::size_t ci = 0; ci < dy.c; ++ci)
                for (std::size_t xo = 0; xo < dy.l; ++xo) {
                    const double v = dy.at(bi, ci, xo) * inv;
                    for (std::size_t k = 0; k < p_; ++k) dx.at(bi, ci, xo * p_ + k) = v;
                }
        return dx;
    }

    void complexity(std::size_t&, std::size_t& l, std::uint64_t&, std::uint64_t&) const override {
        l = l / p_;
    }

  private:
    std::size_t p_;
    std::size_t in_l_ = 0;
};

class GlobalAvgPool final : public Layer {
  public:
    Tensor3 forward(const Tensor3& x, double*, RunMode) override {
        in_l_ = x.l;
        Tensor3 y(x.b, x.c, 1);
        const double inv = 1.0 / static_cast<double>(x.l);
        for (std::size_t bi = 0; bi < x.b; ++bi)
            for (std::size_t ci = 0; ci < x.c; ++ci) {
                double s = 0.0;
                for (std::size_t xi = 0; xi < x.l; ++xi) s += x.at(bi, ci, xi);
                y.at(bi, ci, 0) = s * inv;
            }
        return y;
    }
    Tensor3 backward(const Tensor3& dy, const double*, double*) override {
        Tensor3 dx(dy.b, dy.c, in_l_);
        const double inv = 1.0 / static_cast<double>(in_l_);
        for (std::size_t bi = 0; bi < dy.b; ++bi)
            for (std::size_t ci = 0; ci < dy.c; ++ci) {
                const double v = dy.at(bi, ci, 0) * inv;
                for (std::size_t xi = 0; xi < in_l_; ++xi) dx.at(bi, ci, xi) = v;
            }
        return dx;
    }
    void complexity(std::size_t&, std::size_t& l, std::uint64_t&, std::uint64_t&) const override {
        l = 1;
    }

  private:
    std::size_t in_l_ = 0;
};

// (b, c, l) -> (b, c*l, 1); the storage order already matches.
class Flatten final : public Layer {
  public:
    Tensor3 forward(const Tensor3& x, double*, RunMode) override {
        in_c_ = x.c;
        in_l_ = x.l;
        Tensor3 y = x;
        y.c = x.c * x.l;
        y.l = 1;
        return y;
    }
    Tensor3 backward(const Tensor3& dy, const double*, double*) override {
        Tensor3 dx = dy;
        dx.c = in_c_;
        dx.l = in_l_;
        return dx;
    }
    void complexity(std::size_t& c, std::size_t& l, std::uint64_t&, std::uint64_t&) const override {
        c = c * l;
        l = 1;
    }

  private:
    std::size_t in_c_ = 0, in_l_ = 0;
};

class Linear final : public Layer {
  public:
    Linear(ParamAllocator& alloc, std::vector<TensorDesc>& layout, const std::string& name,
           std::size_t in, std::size_t out)
        : in_(in), out_(out), name_(name) {
        w_ = alloc.add(layout, name + ".w", {out, in}, true);
        b_ = alloc.add(layout, name + ".b", {out}, true);
    }

    void init(Rng& rng, double* p) override {
        const double scale = std::sqrt(2.0 / static_cast<double>(in_));
        for (std::size_t i = 0; i < out_ * in_; ++i) p[w_ + i] = rng.normal(0.0, scale);
        for (std::size_t i = 0; i < out_; ++i) p[b_ + i] = 0.0;
    }

    Tensor3 forward(const Tensor3& x, double* p, RunMode) override {
        if (x.c != in_ || x.l != 1)
            throw ConfigError("linear layer " + name_ + ": expected " + std::to_string(in_) +
                              " features, got " + std::to_string(x.c) + "x" + std::to_string(x.l));
        x_ = x;
        Tensor3 y(x.b, out_, 1);
        const double* w = p + w_;
        const double* bias = p + b_;
        for (std::size_t bi = 0; bi < x.b; ++bi) {
            const double* xrow = &x_.at(bi, 0, 0);
            for (std::size_t o = 0; o < out_; ++o) {
                const double* wrow = w + o * in_;
                double s = bias[o];
                for (std::size_t i = 0; i < in_; ++i) s += wrow[i] * xrow[i];
                y.at(bi, o, 0) = s;
            }
        }
        return y;
    }

    Tensor3 backward(const Tensor3& dy, const double* p, double* g) override {
        Tensor3 dx(x_.b, in_, 1);
        const double* w = p + w_;
        for (std::size_t o = 0; o < out_; ++o) {
            double* dwrow = g + w_ + o * in_;
            double db = 0.0;
            for (std::size_t bi = 0; bi < dy.b; ++bi) {
                const double d = dy.at(bi, o, 0);
                db += d;
                const double* xrow = &x_.at(bi, 0, 0);
                for (std::size_t i = 0; i < in_; ++i) dwrow[i] += d * xrow[i];
            }
            g[b_ + o] += db;
        }
        for (std::size_t bi = 0; bi < dy.b; ++bi) {
            double* dxrow = &dx.at(bi, 0, 0);
            for (std::size_t o = 0; o < out_; ++o) {
                const double d = dy.at(bi, o, 0);
                const double* wrow = w + o * in_;
                for (std::size_t i = 0; i < in_; ++i) dxrow[i] += d * wrow[i];
            }
        }
        return dx;
    }

    void complexity(std::size_t& c, std::size_t& l, std::uint64_t& params,
                    std::uint64_t& macs) const override {
        params += static_cast<std::uint64_t>(out_) * in_ + out_;
        macs += static_cast<std::uint64_t>(out_) * in_;
        c = out_;
        l = 1;
    }

  private:
    std::size_t in_, out_;
    std::string name_;
    std::size_t w_ = 0, b_ = 0;
    Tensor3 x_;
};

// main path + optional projection skip, ReLU after the sum.
class Residual final : public Layer {
  public:
    Residual(std::vector<std::unique_ptr<Layer>> main, std::vector<std::unique_ptr<Layer>> skip)
        : main_(std::move(main)), skip_(std::move(skip)) {}

    void init(Rng& rng, double* p) override {
        for (auto& l : main_) l->init(rng, p);
        for (auto& l : skip_) l->init(rng, p);
    }

    Tensor3 forward(const Tensor3& x, double* p, RunMode mode) override {
        Tensor3 m = x;
        for (auto& l : main_) m = l->forward(m, p, mode);
        Tensor3 s = x;
        for (auto& l : skip_) s = l->forward(s, p, mode);
        if (m.b != s.b || m.c != s.c || m.l != s.l)
            throw ConfigError("residual block: main and skip shapes disagree");
        Tensor3 y(m.b, m.c, m.l);
        for (std::size_t i = 0; i < y.v.size(); ++i) {
            const double v = m.v[i] + s.v[i];
            y.v[i] = v > 0.0 ? v : 0.0;
        }
        y_ = y;
        return y;
    }

    Tensor3 backward(const Tensor3& dy, const double* p, double* g) override {
        Tensor3 dz = dy;
        for (std::size_t i = 0; i < dz.v.size(); ++i)
            if (y_.v[i] <= 0.0) dz.v[i] = 0.0;
        Tensor3 dmain = dz;
        for (auto it = main_.rbegin(); it != main_.rend(); ++it) dmain = (*it)->backward(dmain, p, g);
        Tensor3 dskip = dz;
        for (auto it = skip_.rbegin(); it != skip_.rend(); ++it) dskip = (*it)->backward(dskip, p, g);
        Tensor3 dx = dmain;
        for (std::size_t i = 0; i < dx.v.size(); ++i) dx.v[i] += dskip.v[i];
        return dx;
    }

    void complexity(std::size_t& c, std::size_t& l, std::uint64_t& params,
                    std::uint64_t& macs) const override {
        std::size_t mc = c, ml = l;
        for (auto& layer : main_) layer->complexity(mc, ml, params, macs);
        std::size_t sc = c, sl = l;
        for (auto& layer : skip_) layer->complexity(sc, sl, params, macs);
        c = mc;
        l = ml;
    }

  private:
    std::vector<std::unique_ptr<Layer>> main_;
    std::vector<std::unique_ptr<Layer>> skip_;
    Tensor3 y_;
};

struct Net {
    std::vector<std::unique_ptr<Layer>> layers;
    std::vector<TensorDesc> layout;
    std::size_t n_net_values = 0;

    Tensor3 forward(Tensor3 x, double* p, RunMode mode) {
        for (auto& l : layers) x = l->forward(x, p, mode);
        return x;
    }
    Tensor3 backward(Tensor3 dy, const double* p, double* g) {
        for (auto it = layers.rbegin(); it != layers.rend(); ++it) dy = (*it)->backward(dy, p, g);
        return dy;
    }
    void init(Rng& rng, double* p) {
        for (auto& l : layers) l->init(rng, p);
    }
};

// The one place the architecture is defined; build_model, load_model and
// count_complexity all walk this.
inline Net build_net(const ModelConfig& cfg) {
    cfg.validate();
    Net net;
    ParamAllocator alloc;

    std::size_t c = 1;
    std::size_t l = cfg.input_len;

    net.layers.push_back(std::make_unique<Conv1d>(alloc, net.layout, "stem.conv", c,
                                                  cfg.stem_filters, 3, 1, 1));
    net.layers.push_back(std::make_unique<BatchNorm1d>(alloc, net.layout, "stem.bn", cfg.stem_filters));
    net.layers.push_back(std::make_unique<ReLU>());
    c = cfg.stem_filters;

    for (std::size_t i = 0; i < cfg.block_filters.size(); ++i) {
        const std::size_t f = cfg.block_filters[i];
        const std::string base = "block" + std::to_string(i);
        std::vector<std::unique_ptr<Layer>> main;
        main.push_back(std::make_unique<Conv1d>(alloc, net.layout, base + ".conv1", c, f, 3, 1, 1));
        main.push_back(std::make_unique<BatchNorm1d>(alloc, net.layout, base + ".bn1", f));
        main.push_back(std::make_unique<ReLU>());
        main.push_back(std::make_unique<Conv1d>(alloc, net.layout, base + ".conv2", f, f, 3, 1, 1));
        main.push_back(std::make_unique<BatchNorm1d>(alloc, net.layout, base + ".bn2", f));
        std::vector<std::unique_ptr<Layer>> skip;
        if (c != f)
            skip.push_back(std::make_unique<Conv1d>(alloc, net.layout, base + ".proj", c, f, 1, 1, 0));
        net.layers.push_back(std::make_unique<Residual>(std::move(main), std::move(skip)));
        net.layers.push_back(std::make_unique<AvgPool1d>(cfg.pool_stride));
        c = f;
        if (l < cfg.pool_stride)
            throw ConfigError("model config: input too short for pooling at block " +
                              std::to_string(i));
        l = l / cfg.pool_stride;
    }

    std::size_t feat;
    if (cfg.head == HeadKind::global_average) {
        net.layers.push_back(std::make_unique<GlobalAvgPool>());
        feat = c;
    } else {
        net.layers.push_back(std::make_unique<Flatten>());
        feat = c * l;
    }

    for (std::size_t i = 0; i < cfg.mlp_dims.size(); ++i) {
        net.layers.push_back(std::make_unique<Linear>(alloc, net.layout,
                                                      "mlp" + std::to_string(i), feat,
                                                      cfg.mlp_dims[i]));
        if (i + 1 < cfg.mlp_dims.size()) net.layers.push_back(std::make_unique<ReLU>());
        feat = cfg.mlp_dims[i];
    }

    net.n_net_values = alloc.total();

    // Input/label normalization statistics travel with the weights.
    alloc.add(net.layout, "input_mean", {cfg.input_len}, false);
    alloc.add(net.layout, "input_std", {cfg.input_len}, false);
    alloc.add(net.layout, "label_center", {2}, false);
    alloc.add(net.layout, "label_scale", {1}, false);
    net.n_net_values = alloc.total();
    return net;
}


}  // namespace rfsim::nn
