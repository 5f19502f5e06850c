#include "decdm/ddim.hpp"

#include <cmath>
#include <cstdlib>

#include "decdm/binary_format.hpp"
#include "decdm/error.hpp"
#include "decdm/io.hpp"
#include "decdm/parallel.hpp"
#include "json.hpp"

namespace decdm {

namespace {

constexpr std::size_t kSampleChunk = 256;

// Moves x from schedule index `from` to `to` with eps anchored at (x, from).
Eigen::MatrixXd transfer(const Eigen::MatrixXd& x, int from, int to, const DenoiserModel& model) {
    const NoiseSchedule& s = model.schedule;
    const double a_from = s.alpha(from), a_to = s.alpha(to);
    const double scale = std::sqrt(a_to / a_from);
    const double noise_coef = std::sqrt(a_to) * (s.sigma(to) - s.sigma(from));
    return scale * x + noise_coef * predict_eps(model, x, from);
}

}  // namespace

IntegrationPlan IntegrationPlan::uniform(int t_start, int t_end, int n_steps) {
    const int span = std::abs(t_end - t_start);
    if (n_steps < 1 || n_steps > span)
        throw ConfigError("step count " + std::to_string(n_steps) + " must lie in [1, " + std::to_string(span) + "]");
    IntegrationPlan plan{t_start, t_end, {}};
    plan.timesteps.reserve(static_cast<std::size_t>(n_steps) + 1);
    for (int i = 0; i <= n_steps; ++i)
        plan.timesteps.push_back(t_start + static_cast<int>(std::lround(static_cast<double>(i) * (t_end - t_start) / n_steps)));
    return plan;
}

void IntegrationPlan::validate() const {
    if (timesteps.size() < 2) throw ConfigError("integration plan needs at least one step");
    if (timesteps.front() != t_start || timesteps.back() != t_end)
        throw ConfigError("integration plan endpoints do not match its timesteps");
    const bool up = ascending();
    for (std::size_t i = 1; i < timesteps.size(); ++i)
        if (up ? timesteps[i] <= timesteps[i - 1] : timesteps[i] >= timesteps[i - 1])
            throw ConfigError("integration plan timesteps are not strictly monotone");
}

IntegrationPlan IntegrationPlan::reversed() const {
    return {t_end, t_start, std::vector<int>(timesteps.rbegin(), timesteps.rend())};
}

Eigen::MatrixXd ddim_step_reverse(const Eigen::MatrixXd& x, int t, int t_prev, const DenoiserModel& model) {
    if (t_prev >= t) throw ConfigError("reverse DDIM step needs t_prev < t");
    return transfer(x, t, t_prev, model);
}

Eigen::MatrixXd ddim_step_forward(const Eigen::MatrixXd& x, int t, int t_next, const DenoiserModel& model) {
    if (t_next <= t) throw ConfigError("forward DDIM step needs t_next > t");
    return transfer(x, t, t_next, model);
}

Eigen::MatrixXd s_ode(const Eigen::MatrixXd& x, const DenoiserModel& model, const IntegrationPlan& plan) {
    plan.validate();
    const int T = model.schedule.horizon();
    for (int t : {plan.t_start, plan.t_end})
        if (t < 0 || t > T)
            throw ConfigError("plan endpoint " + std::to_string(t) + " outside the model schedule [0, " +
                              std::to_string(T) + "]");
    if (x.rows() != model.data_dim()) throw ConfigError("sample dimension does not match model data shape");

    Eigen::MatrixXd out(x.rows(), x.cols());
    const bool up = plan.ascending();
    parallel_chunks(static_cast<std::size_t>(x.cols()), kSampleChunk, [&](std::size_t begin, std::size_t end) {
        const auto b = static_cast<Eigen::Index>(begin), n = static_cast<Eigen::Index>(end - begin);
        Eigen::MatrixXd cur = x.middleCols(b, n);
        for (std::size_t i = 1; i < plan.timesteps.size(); ++i) {
            const int from = plan.timesteps[i - 1], to = plan.timesteps[i];
            cur = up ? ddim_step_forward(cur, from, to, model) : ddim_step_reverse(cur, from, to, model);
        }
        out.middleCols(b, n) = cur;
    });
    return out;
}

LatentBatch encode(const DenoiserModel& model, const Eigen::MatrixXd& batch, int n_steps) {
    LatentBatch lb;
    lb.plan = IntegrationPlan::uniform(0, model.schedule.horizon(), n_steps);
    lb.source_domain_tag = model.domain_tag;
    lb.schedule_hash = model.schedule.hash();
    lb.data_shape = model.data_shape;
    if (batch.rows() != model.data_dim() && batch.cols() > 0)
        throw ConfigError("sample dimension does not match model data shape");
    if (batch.cols() == 0) {
        lb.latents.resize(model.data_dim(), 0);
        return lb;
    }
    lb.latents = s_ode(batch, model, lb.plan).cast<float>();
    return lb;
}

Eigen::MatrixXd decode(const DenoiserModel& model, const LatentBatch& latents) {
    if (latents.data_shape != model.data_shape) throw ConfigError("latent data shape does not match the decoding model");
    if (latents.plan.t_end != model.schedule.horizon())
        throw ConfigError("latent endpoint T=" + std::to_string(latents.plan.t_end) + " does not match model T=" +
                          std::to_string(model.schedule.horizon()));
    const IntegrationPlan down = latents.plan.reversed();
    if (latents.count() == 0) return Eigen::MatrixXd(model.data_dim(), 0);
    return s_ode(latents.latents.cast<double>(), model, down);
}

std::vector<unsigned char> encode_latent_file(const LatentBatch& batch) {
    const nlohmann::json header = {
        {"source_domain_tag", batch.source_domain_tag},
        {"schedule_hash", batch.schedule_hash},
        {"data_shape", batch.data_shape},
        {"plan", {{"t_start", batch.plan.t_start}, {"t_end", batch.plan.t_end}, {"n_steps", batch.plan.n_steps()}}},
        {"count", batch.count()},
    };
    const std::string text = header.dump();
    wire::Writer w;
    w.magic("DECZ");
    w.u16(kLatentVersion);
    w.u32(static_cast<std::uint32_t>(text.size()));
    w.text(text);
    for (Eigen::Index j = 0; j < batch.latents.cols(); ++j)
        for (Eigen::Index d = 0; d < batch.latents.rows(); ++d) w.f32(batch.latents(d, j));
    return w.take();
}

LatentBatch decode_latent_file(const std::vector<unsigned char>& bytes) {
    wire::Reader r(bytes, "latent file");
    r.expect_magic("DECZ");
    const auto version = r.u16();
    if (version != kLatentVersion) throw ProtocolError("latent file: unsupported format version " + std::to_string(version));
    const std::string text = r.text(r.u32());

    LatentBatch lb;
    std::size_t count = 0;
    int n_steps = 0;
    try {
        const auto header = nlohmann::json::parse(text);
        lb.source_domain_tag = header.at("source_domain_tag").get<std::string>();
        lb.schedule_hash = header.at("schedule_hash").get<std::string>();
        lb.data_shape = header.at("data_shape").get<std::vector<int>>();
        const auto& plan = header.at("plan");
        lb.plan.t_start = plan.at("t_start").get<int>();
        lb.plan.t_end = plan.at("t_end").get<int>();
        n_steps = plan.at("n_steps").get<int>();
        count = header.at("count").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("latent file: malformed header: ") + e.what());
    }
    int dim = 0;
    try {
        lb.plan = IntegrationPlan::uniform(lb.plan.t_start, lb.plan.t_end, n_steps);
        dim = shape_size(lb.data_shape);
    } catch (const ConfigError& e) {
        throw ProtocolError(std::string("latent file: ") + e.what());
    }
    r.expect_floats(count * static_cast<std::size_t>(dim));
    lb.latents.resize(dim, static_cast<Eigen::Index>(count));
    for (Eigen::Index j = 0; j < lb.latents.cols(); ++j)
        for (Eigen::Index d = 0; d < dim; ++d) lb.latents(d, j) = r.f32();
    return lb;
}

void save_latents(const std::filesystem::path& path, const LatentBatch& batch) {
    io::write_bytes(path, encode_latent_file(batch));
}

LatentBatch load_latents(const std::filesystem::path& path) { return decode_latent_file(io::read_bytes(path)); }

}  // namespace decdm
