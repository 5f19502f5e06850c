#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "decdm/mlp.hpp"
#include "decdm/rng.hpp"
#include "decdm/schedule.hpp"

namespace decdm {

/// A time-conditioned noise predictor eps(x, t). Implementations are immutable.
class EpsNetwork {
public:
    virtual ~EpsNetwork() = default;
    virtual int data_dim() const = 0;
    /// x: data_dim x B evaluated at one shared (possibly fractional) timestep.
    virtual Eigen::MatrixXd predict(const Eigen::MatrixXd& x, double t) const = 0;
    /// The trained network, or nullptr for analytic stand-ins.
    virtual const Mlp<float>* mlp() const { return nullptr; }
};

/// The learned predictor. Evaluates in float32.
class MlpEpsNetwork final : public EpsNetwork {
public:
    explicit MlpEpsNetwork(Mlp<float> net) : net_(std::move(net)) {}
    int data_dim() const override { return net_.arch().data_dim; }
    Eigen::MatrixXd predict(const Eigen::MatrixXd& x, double t) const override;
    const Mlp<float>* mlp() const override { return &net_; }

private:
    Mlp<float> net_;
};

/// eps(x, t) = c for every input. Used to check the integrator's algebra.
class ConstantEpsNetwork final : public EpsNetwork {
public:
    explicit ConstantEpsNetwork(Eigen::VectorXd value) : value_(std::move(value)) {}
    int data_dim() const override { return static_cast<int>(value_.size()); }
    Eigen::MatrixXd predict(const Eigen::MatrixXd& x, double t) const override;

private:
    Eigen::VectorXd value_;
};

/// A trained single-domain diffusion model.
struct DenoiserModel {
    NoiseSchedule schedule;
    std::string domain_tag;
    std::vector<int> data_shape;
    std::shared_ptr<const EpsNetwork> network;

    int data_dim() const;
};

/// Model whose predictor always returns zero (or a fixed vector).
DenoiserModel make_stub_model(const NoiseSchedule& schedule, std::vector<int> data_shape,
                              const Eigen::VectorXd& constant_eps, std::string domain_tag = "stub");

int shape_size(const std::vector<int>& shape);

/// sqrt(alpha_t) x0 + sqrt(1 - alpha_t) eps. x0 and eps may hold several samples.
Eigen::MatrixXd forward_sample(const Eigen::MatrixXd& x0, int t, const Eigen::MatrixXd& eps,
                               const NoiseSchedule& schedule);

/// eps_theta(x, t) for a batch. t may be fractional but must lie in [0, T].
Eigen::MatrixXd predict_eps(const DenoiserModel& model, const Eigen::MatrixXd& x, double t);

/// One Monte-Carlo draw of the denoising objective: per sample t ~ U{1..T}
/// and eps ~ N(0, I). Draw order is (t, then eps coordinates) per sample.
struct NoisedBatch {
    Eigen::MatrixXd noisy;   // x_t
    Eigen::MatrixXd noise;   // eps
    Eigen::VectorXd steps;   // t per sample
};

NoisedBatch draw_noised_batch(const Eigen::MatrixXd& x0, const NoiseSchedule& schedule, Rng& rng);

template <typename Real>
struct LossAndGradient {
    double loss = 0.0;
    std::vector<Real> gradient;
};

/// Mean over samples of ||eps_hat - eps||^2 and its gradient w.r.t. the
/// network parameters.
template <typename Real>
LossAndGradient<Real> denoise_loss(const Mlp<Real>& net, const NoisedBatch& batch);

/// Loss value only, for any predictor (held-out evaluation, stubs).
double denoise_loss(const EpsNetwork& net, const NoisedBatch& batch);

struct TrainConfig {
    long steps = 20000;
    int batch_size = 256;
    double learning_rate = 2e-4;
    /// Learning rate at the last step as a fraction of the initial rate
    /// (cosine decay). 1 keeps it constant.
    double final_lr_fraction = 1.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double clip_norm = 1.0;
    std::uint64_t seed = 0;
    long log_every = 100;

    void validate() const;
};

struct LossPoint {
    long step;
    double loss;
};

/// The data of exactly one domain. Training never sees anything else.
struct DomainData {
    Eigen::MatrixXd samples;  // dim x count
    std::string tag;
    std::vector<int> shape;
};

struct TrainResult {
    DenoiserModel model;
    std::vector<LossPoint> curve;  // minibatch loss every log_every steps
};

/// Adam on the denoising objective with global-norm gradient clipping.
/// arch.data_dim must equal the sample dimension. Throws NumericError with
/// the step index if the loss becomes non-finite.
TrainResult train(const DomainData& data, const MlpArch& arch, const TrainConfig& cfg,
                  const NoiseSchedule& schedule, const std::function<void(const LossPoint&)>& on_log = {});

}  // namespace decdm
