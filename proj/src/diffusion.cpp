#include "decdm/diffusion.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "decdm/error.hpp"

namespace decdm {

Eigen::MatrixXd MlpEpsNetwork::predict(const Eigen::MatrixXd& x, double t) const {
    const Eigen::VectorXd steps = Eigen::VectorXd::Constant(x.cols(), t);
    return net_.forward(x.cast<float>(), steps).cast<double>();
}

Eigen::MatrixXd ConstantEpsNetwork::predict(const Eigen::MatrixXd& x, double) const {
    if (x.rows() != value_.size()) throw ConfigError("input dimension does not match constant predictor");
    return value_.replicate(1, x.cols());
}

int shape_size(const std::vector<int>& shape) {
    if (shape.empty()) throw ConfigError("data shape must have at least one dimension");
    int n = 1;
    for (int d : shape) {
        if (d < 1) throw ConfigError("data shape entries must be positive");
        n *= d;
    }
    return n;
}

int DenoiserModel::data_dim() const { return shape_size(data_shape); }

DenoiserModel make_stub_model(const NoiseSchedule& schedule, std::vector<int> data_shape,
                              const Eigen::VectorXd& constant_eps, std::string domain_tag) {
    if (constant_eps.size() != shape_size(data_shape)) throw ConfigError("stub value does not match data shape");
    return DenoiserModel{schedule, std::move(domain_tag), std::move(data_shape),
                         std::make_shared<ConstantEpsNetwork>(constant_eps)};
}

Eigen::MatrixXd forward_sample(const Eigen::MatrixXd& x0, int t, const Eigen::MatrixXd& eps,
                               const NoiseSchedule& schedule) {
    if (t < 0 || t > schedule.horizon())
        throw ConfigError("timestep " + std::to_string(t) + " outside [0, " + std::to_string(schedule.horizon()) + "]");
    if (eps.rows() != x0.rows() || eps.cols() != x0.cols()) throw ConfigError("noise must be shaped like the sample");
    const double a = schedule.alpha(t);
    return std::sqrt(a) * x0 + std::sqrt(1.0 - a) * eps;
}

Eigen::MatrixXd predict_eps(const DenoiserModel& model, const Eigen::MatrixXd& x, double t) {
    if (!model.network) throw ConfigError("model has no network");
    if (!(t >= 0.0 && t <= model.schedule.horizon()))
        throw ConfigError("timestep outside [0, T] in noise prediction");
    if (x.rows() != model.data_dim()) throw ConfigError("sample dimension does not match model data shape");
    return model.network->predict(x, t);
}

NoisedBatch draw_noised_batch(const Eigen::MatrixXd& x0, const NoiseSchedule& schedule, Rng& rng) {
    NoisedBatch b;
    b.noisy.resize(x0.rows(), x0.cols());
    b.noise.resize(x0.rows(), x0.cols());
    b.steps.resize(x0.cols());
    const int T = schedule.horizon();
    for (Eigen::Index j = 0; j < x0.cols(); ++j) {
        const int t = static_cast<int>(rng.integer(1, T));
        b.steps[j] = t;
        for (Eigen::Index d = 0; d < x0.rows(); ++d) b.noise(d, j) = rng.normal();
        const double a = schedule.alpha(t);
        b.noisy.col(j) = std::sqrt(a) * x0.col(j) + std::sqrt(1.0 - a) * b.noise.col(j);
    }
    return b;
}

template <typename Real>
LossAndGradient<Real> denoise_loss(const Mlp<Real>& net, const NoisedBatch& batch) {
    using Matrix = typename Mlp<Real>::Matrix;
    const auto n = batch.noisy.cols();
    if (n == 0) throw ConfigError("denoising loss needs a nonempty batch");
    typename Mlp<Real>::Cache cache;
    const Matrix out = net.forward(batch.noisy.cast<Real>(), batch.steps, cache);
    const Matrix diff = out - batch.noise.cast<Real>();
    LossAndGradient<Real> r;
    r.loss = diff.template cast<double>().squaredNorm() / static_cast<double>(n);
    net.backward(cache, (Real(2) / static_cast<Real>(n)) * diff, r.gradient);
    return r;
}

template LossAndGradient<float> denoise_loss(const Mlp<float>&, const NoisedBatch&);
template LossAndGradient<double> denoise_loss(const Mlp<double>&, const NoisedBatch&);

double denoise_loss(const EpsNetwork& net, const NoisedBatch& batch) {
    const auto n = batch.noisy.cols();
    if (n == 0) throw ConfigError("denoising loss needs a nonempty batch");
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
        total += (net.predict(batch.noisy.col(j), batch.steps[j]) - batch.noise.col(j)).squaredNorm();
    return total / static_cast<double>(n);
}

void TrainConfig::validate() const {
    if (steps < 0) throw ConfigError("training steps must be non-negative");
    if (batch_size < 1) throw ConfigError("batch size must be positive");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0))
        throw ConfigError("final learning-rate fraction must lie in (0, 1]");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw ConfigError("optimizer moments must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) throw ConfigError("optimizer epsilon must be positive");
    if (!(clip_norm > 0.0)) throw ConfigError("gradient clip threshold must be positive");
    if (log_every < 1) throw ConfigError("log interval must be positive");
}

TrainResult train(const DomainData& data, const MlpArch& arch, const TrainConfig& cfg,
                  const NoiseSchedule& schedule, const std::function<void(const LossPoint&)>& on_log) {
    cfg.validate();
    if (data.samples.cols() == 0) throw ConfigError("training dataset for '" + data.tag + "' is empty");
    if (shape_size(data.shape) != data.samples.rows())
        throw ConfigError("dataset rows do not match its declared shape");
    if (arch.data_dim != data.samples.rows())
        throw ConfigError("architecture data dimension does not match the dataset");

    Rng rng(cfg.seed);
    Mlp<float> net = Mlp<float>::initialized(arch, rng.next_seed());
    std::vector<LossPoint> curve;

    const std::size_t np = net.params().size();
    std::vector<double> m(np, 0.0), v(np, 0.0);
    const Eigen::Index count = data.samples.cols();
    Eigen::MatrixXd x0(data.samples.rows(), cfg.batch_size);

    for (long step = 1; step <= cfg.steps; ++step) {
        for (int j = 0; j < cfg.batch_size; ++j) x0.col(j) = data.samples.col(rng.integer(0, count - 1));
        const NoisedBatch batch = draw_noised_batch(x0, schedule, rng);
        LossAndGradient<float> lg = denoise_loss(net, batch);
        if (!std::isfinite(lg.loss))
            throw NumericError("training of '" + data.tag + "' diverged: non-finite loss at step " + std::to_string(step));

        double norm_sq = 0.0;
        for (float g : lg.gradient) norm_sq += static_cast<double>(g) * g;
        const double norm = std::sqrt(norm_sq);
        if (!std::isfinite(norm))
            throw NumericError("training of '" + data.tag + "' diverged: non-finite gradient at step " +
                               std::to_string(step));
        const double scale = norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;

        const double progress = static_cast<double>(step - 1) / static_cast<double>(cfg.steps);
        const double lr = cfg.learning_rate *
                          (cfg.final_lr_fraction +
                           (1.0 - cfg.final_lr_fraction) * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        auto& p = net.params();
        for (std::size_t k = 0; k < np; ++k) {
            const double g = scale * lg.gradient[k];
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g;
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g * g;
            p[k] = static_cast<float>(p[k] - lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + cfg.adam_epsilon));
        }

        if (step % cfg.log_every == 0 || step == cfg.steps) {
            curve.push_back({step, lg.loss});
            if (on_log) on_log(curve.back());
        }
    }

    DenoiserModel model{schedule, data.tag, data.shape, std::make_shared<MlpEpsNetwork>(std::move(net))};
    return {std::move(model), std::move(curve)};
}

}  // namespace decdm
