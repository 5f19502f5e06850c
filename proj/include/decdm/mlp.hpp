#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "decdm/error.hpp"

namespace decdm {

/// Noise-prediction MLP shape: [x ; time embedding] -> hidden... -> x-shaped output.
struct MlpArch {
    int data_dim = 2;
    std::vector<int> hidden{128, 128, 128};
    int time_dim = 64;

    int input_dim() const { return data_dim + time_dim; }

    std::size_t param_count() const {
        std::size_t n = 0;
        int in = input_dim();
        for (int h : hidden) {
            n += static_cast<std::size_t>(h) * in + h;
            in = h;
        }
        return n + static_cast<std::size_t>(data_dim) * in + data_dim;
    }

    void validate() const {
        if (data_dim < 1) throw ConfigError("network data dimension must be positive");
        if (time_dim < 2 || time_dim % 2 != 0) throw ConfigError("time embedding dimension must be even and >= 2");
        for (int h : hidden)
            if (h < 1) throw ConfigError("hidden widths must be positive");
    }

    friend bool operator==(const MlpArch&, const MlpArch&) = default;
};

/// Sinusoidal embedding of (possibly fractional) timesteps: rows [0, dim/2) hold
/// sin(t * w_k), rows [dim/2, dim) hold cos(t * w_k), w_k = 10000^(-k / (dim/2)).
template <typename Real>
Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> time_embedding(const Eigen::VectorXd& t, int dim) {
    const int half = dim / 2;
    Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> emb(dim, t.size());
    for (int k = 0; k < half; ++k) {
        const double w = std::exp(-std::log(10000.0) * k / half);
        for (Eigen::Index j = 0; j < t.size(); ++j) {
            emb(k, j) = static_cast<Real>(std::sin(t[j] * w));
            emb(half + k, j) = static_cast<Real>(std::cos(t[j] * w));
        }
    }
    return emb;
}

/// Fully connected network with SiLU hidden activations and a linear output.
///
/// Parameters live in one flat vector, layer by layer: the weight matrix
/// (out x in, column-major) followed by the bias. Samples are columns.
template <typename Real>
class Mlp {
public:
    using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

    /// Activations kept by forward() for the backward pass.
    struct Cache {
        std::vector<Matrix> inputs;  // input to each layer
        std::vector<Matrix> pre;     // pre-activation of each hidden layer
    };

    Mlp() = default;

    Mlp(MlpArch arch, std::vector<Real> params) : arch_(std::move(arch)), params_(std::move(params)) {
        arch_.validate();
        if (params_.size() != arch_.param_count())
            throw ConfigError("parameter vector has " + std::to_string(params_.size()) + " entries, architecture needs " +
                              std::to_string(arch_.param_count()));
    }

    /// Fan-in scaled uniform init: every weight and bias of a layer with fan-in
    /// n is drawn from U(-1/sqrt(n), 1/sqrt(n)).
    static Mlp initialized(const MlpArch& arch, std::uint64_t seed) {
        arch.validate();
        std::mt19937_64 engine(seed);
        std::vector<Real> p;
        p.reserve(arch.param_count());
        int in = arch.input_dim();
        auto layer = [&](int out) {
            std::uniform_real_distribution<double> u(-1.0 / std::sqrt(in), 1.0 / std::sqrt(in));
            for (std::size_t k = 0; k < static_cast<std::size_t>(out) * in + out; ++k)
                p.push_back(static_cast<Real>(u(engine)));
            in = out;
        };
        for (int h : arch.hidden) layer(h);
        layer(arch.data_dim);
        return Mlp(arch, std::move(p));
    }

    const MlpArch& arch() const { return arch_; }
    const std::vector<Real>& params() const { return params_; }
    std::vector<Real>& params() { return params_; }

    /// x: data_dim x B, t: B timesteps. Returns data_dim x B.
    Matrix forward(const Matrix& x, const Eigen::VectorXd& t) const { return run(x, t, nullptr); }

    Matrix forward(const Matrix& x, const Eigen::VectorXd& t, Cache& cache) const { return run(x, t, &cache); }

    /// Accumulates nothing: `grad` is resized and overwritten with dLoss/dParams
    /// given dLoss/dOutput.
    void backward(const Cache& cache, const Matrix& grad_out, std::vector<Real>& grad) const {
        grad.assign(params_.size(), Real(0));
        const std::size_t layers = arch_.hidden.size() + 1;
        std::vector<std::size_t> offsets(layers);
        std::vector<int> outs(layers), ins(layers);
        {
            std::size_t off = 0;
            int in = arch_.input_dim();
            for (std::size_t l = 0; l < layers; ++l) {
                const int out = l < arch_.hidden.size() ? arch_.hidden[l] : arch_.data_dim;
                offsets[l] = off;
                ins[l] = in;
                outs[l] = out;
                off += static_cast<std::size_t>(out) * in + out;
                in = out;
            }
        }
        Matrix delta = grad_out;
        for (std::size_t l = layers; l-- > 0;) {
            const Matrix& a = cache.inputs[l];
            Eigen::Map<Matrix> dw(grad.data() + offsets[l], outs[l], ins[l]);
            Eigen::Map<Eigen::Matrix<Real, Eigen::Dynamic, 1>> db(grad.data() + offsets[l] + dw.size(), outs[l]);
            dw.noalias() = delta * a.transpose();
            // Reduce into aligned storage: summing straight into the Map lets
            // the vectorization, and so the rounding, follow the heap address.
            const Eigen::Matrix<Real, Eigen::Dynamic, 1> bias_sum = delta.rowwise().sum();
            db = bias_sum;
            if (l == 0) break;
            Eigen::Map<const Matrix> w(params_.data() + offsets[l], outs[l], ins[l]);
            Matrix da = w.transpose() * delta;
            const auto z = cache.pre[l - 1].array();
            const auto s = (Real(1) + (-z).exp()).inverse();
            delta = (da.array() * s * (Real(1) + z * (Real(1) - s))).matrix();
        }
    }

private:
    Matrix run(const Matrix& x, const Eigen::VectorXd& t, Cache* cache) const {
        if (x.rows() != arch_.data_dim) throw ConfigError("network input has wrong dimension");
        if (x.cols() != t.size()) throw ConfigError("one timestep per sample required");
        Matrix a(arch_.input_dim(), x.cols());
        a.topRows(arch_.data_dim) = x;
        a.bottomRows(arch_.time_dim) = time_embedding<Real>(t, arch_.time_dim);
        if (cache) {
            cache->inputs.clear();
            cache->pre.clear();
        }
        std::size_t off = 0;
        int in = arch_.input_dim();
        const std::size_t layers = arch_.hidden.size() + 1;
        for (std::size_t l = 0; l < layers; ++l) {
            const int out = l < arch_.hidden.size() ? arch_.hidden[l] : arch_.data_dim;
            Eigen::Map<const Matrix> w(params_.data() + off, out, in);
            Eigen::Map<const Eigen::Matrix<Real, Eigen::Dynamic, 1>> b(params_.data() + off + w.size(), out);
            Matrix z = w * a;
            z.colwise() += b;
            if (cache) cache->inputs.push_back(std::move(a));
            off += static_cast<std::size_t>(out) * in + out;
            in = out;
            if (l + 1 == layers) return z;
            a = (z.array() / (Real(1) + (-z.array()).exp())).matrix();
            if (cache) cache->pre.push_back(std::move(z));
        }
        return a;  // unreachable
    }

    MlpArch arch_;
    std::vector<Real> params_;
};

}  // namespace decdm
