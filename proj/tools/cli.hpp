#pragma once

#include <string>
#include <vector>

namespace decdm::cli {

/// Environment variable naming the directory that relative output paths
/// are resolved against.
inline constexpr const char* kOutputDirEnv = "DECDM_OUTPUT_DIR";

/// Runs one command line (args[0] is the program name) and returns the
/// process exit code: 0 ok, 2 configuration, 3 numeric, 4 protocol/format.
int run(const std::vector<std::string>& args);

}  // namespace decdm::cli
