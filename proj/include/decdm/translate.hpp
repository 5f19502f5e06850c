#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "decdm/ddim.hpp"
#include "decdm/diffusion.hpp"
#include "decdm/image.hpp"
#include "decdm/io.hpp"

namespace decdm {

/// Two independently trained models joined through their shared latent space.
/// Both must have the same data shape and horizon T.
struct DomainPair {
    DenoiserModel source;
    DenoiserModel target;

    void validate() const;
    DomainPair swapped() const { return {target, source}; }
};

struct PairTraining {
    DomainPair pair;
    std::vector<LossPoint> source_curve;
    std::vector<LossPoint> target_curve;
};

/// Trains the source model on `source` alone, then the target model on
/// `target` alone. The two runs share nothing but the architecture and the
/// schedule; each takes its own config (and therefore its own seed).
PairTraining train_pair(const DomainData& source, const DomainData& target, const MlpArch& arch,
                        const TrainConfig& source_cfg, const TrainConfig& target_cfg, const NoiseSchedule& schedule);

/// decode(target, encode(source, x)).
Eigen::MatrixXd translate(const Eigen::MatrixXd& x, const DomainPair& pair, int n_steps = kDefaultDdimSteps);

/// Translates an image with a patch-domain pair (data shape {h, w}): slide a
/// window of the model's size with the given stride, translate every patch
/// and stitch the results by averaging overlaps.
GrayPatch translate_image(const GrayPatch& image, const DomainPair& pair, int stride_h, int stride_w,
                          int n_steps = kDefaultDdimSteps);

/// Distances from one full cycle: source -> latent -> target -> latent -> source.
struct CycleReport {
    Eigen::VectorXd per_sample_latent_l2;
    Eigen::VectorXd per_sample_source_l2;
    double mean_latent_l2 = 0.0;
    double mean_source_l2 = 0.0;
    int n_steps = 0;
    std::string source_name;
    std::string target_name;
};

/// Intermediate samples of a cycle, for plotting.
struct CycleTrace {
    Eigen::MatrixXd latent;         // encode_s(x)
    Eigen::MatrixXd translated;     // decode_t(latent)
    Eigen::MatrixXd latent_back;    // encode_t(translated)
    Eigen::MatrixXd reconstructed;  // decode_s(latent_back)
};

CycleReport cycle_check(const Eigen::MatrixXd& batch, const DomainPair& pair, int n_steps = kDefaultDdimSteps,
                        CycleTrace* trace = nullptr);

/// sample_id,latent_l2,source_l2 rows followed by a "mean" summary row.
void write_cycle_csv(const std::filesystem::path& path, const CycleReport& report);

// Two-party workflow. Party A owns the source data and model and sends only
// a latent file; party B owns the target model and returns translated samples.

enum class PartyRole { EncoderA, DecoderB };

std::string_view party_role_name(PartyRole role);

/// Reads the source sample CSV and the source checkpoint, writes the latent
/// file. Returns every file access made during the call.
std::vector<io::AccessRecord> party_encode(PartyRole role, const std::filesystem::path& source_data,
                                           const std::filesystem::path& source_checkpoint,
                                           const std::filesystem::path& latent_out,
                                           int n_steps = kDefaultDdimSteps);

/// Reads the latent file and the target checkpoint, writes the translated
/// sample CSV. Rejects latents whose schedule hash differs from the target
/// model's schedule.
std::vector<io::AccessRecord> party_decode(PartyRole role, const std::filesystem::path& latent_file,
                                           const std::filesystem::path& target_checkpoint,
                                           const std::filesystem::path& output);

}  // namespace decdm
