#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "decdm/diffusion.hpp"

namespace decdm {

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// "DECD" | u16 version | u32 header length | JSON header (domain_tag, arch,
/// T, data_shape, schedule_hash, param_count) | float32 alphas_cum[T+1] |
/// float32 params. Only MLP-backed models can be serialized.
std::vector<unsigned char> encode_checkpoint(const DenoiserModel& model);
DenoiserModel decode_checkpoint(const std::vector<unsigned char>& bytes);

void save_checkpoint(const std::filesystem::path& path, const DenoiserModel& model);
DenoiserModel load_checkpoint(const std::filesystem::path& path);

}  // namespace decdm
