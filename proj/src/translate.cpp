#include "decdm/translate.hpp"

#include <cstdio>
#include <string_view>

#include "decdm/checkpoint.hpp"
#include "decdm/error.hpp"
#include "decdm/patches.hpp"
#include "decdm/samples.hpp"

namespace decdm {

void DomainPair::validate() const {
    if (!source.network || !target.network) throw ConfigError("domain pair needs two models");
    if (source.data_shape != target.data_shape) throw ConfigError("source and target data shapes differ");
    if (source.schedule.horizon() != target.schedule.horizon())
        throw ConfigError("source and target schedules have different horizons T");
}

PairTraining train_pair(const DomainData& source, const DomainData& target, const MlpArch& arch,
                        const TrainConfig& source_cfg, const TrainConfig& target_cfg, const NoiseSchedule& schedule) {
    if (source.shape != target.shape) throw ConfigError("source and target samples have different shapes");
    TrainResult s = train(source, arch, source_cfg, schedule);
    TrainResult t = train(target, arch, target_cfg, schedule);
    return {{std::move(s.model), std::move(t.model)}, std::move(s.curve), std::move(t.curve)};
}

Eigen::MatrixXd translate(const Eigen::MatrixXd& x, const DomainPair& pair, int n_steps) {
    pair.validate();
    return decode(pair.target, encode(pair.source, x, n_steps));
}

GrayPatch translate_image(const GrayPatch& image, const DomainPair& pair, int stride_h, int stride_w, int n_steps) {
    pair.validate();
    const auto& shape = pair.source.data_shape;
    if (shape.size() != 2) throw ConfigError("image translation needs models with a 2-D patch shape");
    const PatchGrid grid = slide_window(image, shape[0], shape[1], stride_h, stride_w);
    const Eigen::MatrixXd out = translate(patches_to_samples(grid.patches), pair, n_steps);
    return stitch(grid.with_patches(samples_to_patches(out, shape[0], shape[1])));
}

CycleReport cycle_check(const Eigen::MatrixXd& batch, const DomainPair& pair, int n_steps, CycleTrace* trace) {
    pair.validate();
    if (batch.cols() == 0) throw ConfigError("cycle check needs a nonempty batch");
    const int T = pair.source.schedule.horizon();
    const IntegrationPlan up = IntegrationPlan::uniform(0, T, n_steps);
    const IntegrationPlan down = up.reversed();

    const Eigen::MatrixXd latent = s_ode(batch, pair.source, up);
    Eigen::MatrixXd translated = s_ode(latent, pair.target, down);
    Eigen::MatrixXd latent_back = s_ode(translated, pair.target, up);
    Eigen::MatrixXd reconstructed = s_ode(latent_back, pair.source, down);

    CycleReport r;
    r.per_sample_latent_l2 = (latent - latent_back).colwise().norm().transpose();
    r.per_sample_source_l2 = (batch - reconstructed).colwise().norm().transpose();
    r.mean_latent_l2 = r.per_sample_latent_l2.mean();
    r.mean_source_l2 = r.per_sample_source_l2.mean();
    r.n_steps = n_steps;
    r.source_name = pair.source.domain_tag;
    r.target_name = pair.target.domain_tag;
    if (trace) *trace = {latent, std::move(translated), std::move(latent_back), std::move(reconstructed)};
    return r;
}

void write_cycle_csv(const std::filesystem::path& path, const CycleReport& report) {
    std::string out = "sample_id,latent_l2,source_l2\n";
    char buf[96];
    for (Eigen::Index i = 0; i < report.per_sample_latent_l2.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", static_cast<long long>(i), report.per_sample_latent_l2[i],
                      report.per_sample_source_l2[i]);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "mean,%.17g,%.17g\n", report.mean_latent_l2, report.mean_source_l2);
    out += buf;
    io::write_text(path, out);
}

std::string_view party_role_name(PartyRole role) { return role == PartyRole::EncoderA ? "encoder-a" : "decoder-b"; }

namespace {

void require_role(PartyRole actual, PartyRole expected) {
    if (actual != expected)
        throw ProtocolError("role violation: operation reserved for " + std::string(party_role_name(expected)) +
                            ", called as " + std::string(party_role_name(actual)));
}

}  // namespace

std::vector<io::AccessRecord> party_encode(PartyRole role, const std::filesystem::path& source_data,
                                           const std::filesystem::path& source_checkpoint,
                                           const std::filesystem::path& latent_out, int n_steps) {
    require_role(role, PartyRole::EncoderA);
    io::AuditScope audit;
    const auto head = io::peek_bytes(source_data, 4);
    const std::string_view magic(reinterpret_cast<const char*>(head.data()), head.size());
    if (magic == "DECZ" || magic == "DECD")
        throw ProtocolError("encoder party expects raw source samples, got a binary model or latent file: " +
                            source_data.string());
    const DenoiserModel model = load_checkpoint(source_checkpoint);
    const SampleTable table = read_sample_csv(source_data);
    if (table.values.cols() > 0 && table.values.rows() != model.data_dim())
        throw ProtocolError("source samples have dimension " + std::to_string(table.values.rows()) +
                            ", model expects " + std::to_string(model.data_dim()));
    Eigen::MatrixXd samples = table.values;
    if (samples.cols() == 0) samples.resize(model.data_dim(), 0);
    save_latents(latent_out, encode(model, samples, n_steps));
    return audit.records();
}

std::vector<io::AccessRecord> party_decode(PartyRole role, const std::filesystem::path& latent_file,
                                           const std::filesystem::path& target_checkpoint,
                                           const std::filesystem::path& output) {
    require_role(role, PartyRole::DecoderB);
    io::AuditScope audit;
    const LatentBatch latents = load_latents(latent_file);
    const DenoiserModel model = load_checkpoint(target_checkpoint);
    if (latents.schedule_hash != model.schedule.hash())
        throw ProtocolError("latent schedule hash " + latents.schedule_hash + " does not match target schedule " +
                            model.schedule.hash());
    if (latents.data_shape != model.data_shape) throw ProtocolError("latent data shape does not match target model");
    Eigen::MatrixXd out;
    try {
        out = decode(model, latents);
    } catch (const ConfigError& e) {
        throw ProtocolError(std::string("latent file incompatible with target model: ") + e.what());
    }
    write_sample_csv(output, SampleTable{out, {}});
    return audit.records();
}

}  // namespace decdm
