#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace decdm {

/// A batch of flat samples, one per column, optionally carrying identity
/// labels. This is the in-memory form of every sample CSV the tools exchange.
struct SampleTable {
    Eigen::MatrixXd values;  // dim x count
    std::vector<int> labels; // empty, or one per column
};

/// Header is x,y for 2D data and v0..v{d-1} otherwise, plus a trailing
/// label column when labels are present. Values are written with 17
/// significant digits so doubles survive the round trip exactly.
void write_sample_csv(const std::filesystem::path& path, const SampleTable& table);
SampleTable read_sample_csv(const std::filesystem::path& path);

}  // namespace decdm
