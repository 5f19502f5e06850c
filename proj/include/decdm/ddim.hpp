#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "decdm/diffusion.hpp"

namespace decdm {

inline constexpr int kDefaultDdimSteps = 200;

/// A strictly monotone run of schedule indices from t_start to t_end.
struct IntegrationPlan {
    int t_start = 0;
    int t_end = 0;
    std::vector<int> timesteps;

    int n_steps() const { return static_cast<int>(timesteps.size()) - 1; }
    bool ascending() const { return t_end > t_start; }

    /// timesteps[i] = t_start + round(i * (t_end - t_start) / n_steps).
    /// Needs 1 <= n_steps <= |t_end - t_start|.
    static IntegrationPlan uniform(int t_start, int t_end, int n_steps);

    /// Throws ConfigError unless the invariants hold.
    void validate() const;

    IntegrationPlan reversed() const;

    friend bool operator==(const IntegrationPlan&, const IntegrationPlan&) = default;
};

/// One deterministic DDIM step toward the data end (t_prev < t):
///   x_prev = sqrt(a_prev / a_t) x_t + sqrt(a_prev) (sigma_prev - sigma_t) eps(x_t, t)
Eigen::MatrixXd ddim_step_reverse(const Eigen::MatrixXd& x, int t, int t_prev, const DenoiserModel& model);

/// The inversion step toward the noise end (t_next > t). Same update with the
/// noise prediction anchored at (x_t, t).
Eigen::MatrixXd ddim_step_forward(const Eigen::MatrixXd& x, int t, int t_next, const DenoiserModel& model);

/// Composes DDIM steps along the plan. Samples (columns) are independent and
/// are integrated in parallel chunks.
Eigen::MatrixXd s_ode(const Eigen::MatrixXd& x, const DenoiserModel& model, const IntegrationPlan& plan);

/// Samples at the latent end t = T of a source model. This is the only object
/// that crosses between parties, stored at the float32 precision of its file form.
struct LatentBatch {
    Eigen::MatrixXf latents;  // dim x count
    std::string source_domain_tag;
    std::string schedule_hash;
    std::vector<int> data_shape;
    IntegrationPlan plan;

    Eigen::Index count() const { return latents.cols(); }
};

/// Data (t = 0) to latent (t = T).
LatentBatch encode(const DenoiserModel& model, const Eigen::MatrixXd& batch, int n_steps = kDefaultDdimSteps);

/// Latent (t = T) to data (t = 0) under `model`, mirroring the encoding plan.
/// The model may belong to a different domain; its data shape and T must match.
Eigen::MatrixXd decode(const DenoiserModel& model, const LatentBatch& latents);

inline constexpr std::uint16_t kLatentVersion = 1;

/// "DECZ" | u16 version | u32 header length | JSON header (source_domain_tag,
/// schedule_hash, data_shape, plan endpoints, n_steps, count) | float32 payload,
/// sample after sample.
std::vector<unsigned char> encode_latent_file(const LatentBatch& batch);
LatentBatch decode_latent_file(const std::vector<unsigned char>& bytes);

void save_latents(const std::filesystem::path& path, const LatentBatch& batch);
LatentBatch load_latents(const std::filesystem::path& path);

}  // namespace decdm
