#include "decdm/checkpoint.hpp"

#include "decdm/binary_format.hpp"
#include "decdm/error.hpp"
#include "decdm/io.hpp"
#include "json.hpp"

namespace decdm {

using nlohmann::json;

std::vector<unsigned char> encode_checkpoint(const DenoiserModel& model) {
    const Mlp<float>* net = model.network ? model.network->mlp() : nullptr;
    if (net == nullptr) throw ConfigError("only trained MLP models can be written to a checkpoint");
    const MlpArch& arch = net->arch();
    json header = {
        {"domain_tag", model.domain_tag},
        {"arch", {{"data_dim", arch.data_dim}, {"hidden", arch.hidden}, {"time_dim", arch.time_dim}}},
        {"T", model.schedule.horizon()},
        {"data_shape", model.data_shape},
        {"schedule_hash", model.schedule.hash()},
        {"param_count", net->params().size()},
    };
    const std::string text = header.dump();
    wire::Writer w;
    w.magic("DECD");
    w.u16(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(text.size()));
    w.text(text);
    for (double a : model.schedule.alphas_cum()) w.f32(static_cast<float>(a));
    for (float p : net->params()) w.f32(p);
    return w.take();
}

DenoiserModel decode_checkpoint(const std::vector<unsigned char>& bytes) {
    wire::Reader r(bytes, "checkpoint");
    r.expect_magic("DECD");
    const auto version = r.u16();
    if (version != kCheckpointVersion)
        throw ProtocolError("checkpoint: unsupported format version " + std::to_string(version));
    const std::string text = r.text(r.u32());

    json header;
    MlpArch arch;
    int T = 0;
    std::size_t param_count = 0;
    DenoiserModel model;
    std::string expected_hash;
    try {
        header = json::parse(text);
        const auto& a = header.at("arch");
        arch.data_dim = a.at("data_dim").get<int>();
        arch.hidden = a.at("hidden").get<std::vector<int>>();
        arch.time_dim = a.at("time_dim").get<int>();
        T = header.at("T").get<int>();
        param_count = header.at("param_count").get<std::size_t>();
        model.domain_tag = header.at("domain_tag").get<std::string>();
        model.data_shape = header.at("data_shape").get<std::vector<int>>();
        expected_hash = header.at("schedule_hash").get<std::string>();
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("checkpoint: malformed header: ") + e.what());
    }
    if (T < 2) throw ProtocolError("checkpoint: invalid horizon T=" + std::to_string(T));
    try {
        arch.validate();
        if (shape_size(model.data_shape) != arch.data_dim)
            throw ProtocolError("checkpoint: data shape does not match network dimension");
    } catch (const ConfigError& e) {
        throw ProtocolError(std::string("checkpoint: ") + e.what());
    }
    if (param_count != arch.param_count())
        throw ProtocolError("checkpoint: parameter count does not match architecture");

    r.expect_floats(static_cast<std::size_t>(T) + 1 + param_count);
    std::vector<double> alphas(static_cast<std::size_t>(T) + 1);
    for (double& a : alphas) a = r.f32();
    std::vector<float> params(param_count);
    for (float& p : params) p = r.f32();

    try {
        model.schedule = NoiseSchedule(std::move(alphas));
    } catch (const ConfigError& e) {
        throw ProtocolError(std::string("checkpoint: invalid schedule: ") + e.what());
    }
    if (model.schedule.hash() != expected_hash) throw ProtocolError("checkpoint: schedule hash mismatch");
    model.network = std::make_shared<MlpEpsNetwork>(Mlp<float>(arch, std::move(params)));
    return model;
}

void save_checkpoint(const std::filesystem::path& path, const DenoiserModel& model) {
    io::write_bytes(path, encode_checkpoint(model));
}

DenoiserModel load_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(io::read_bytes(path)); }

}  // namespace decdm
