#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace decdm::cli {

/// Binary PPM scatter plot of 2D points. Points are colored by label
/// (cycling through a fixed palette) and the view spans [-extent, extent]
/// on both axes; points outside it are dropped.
void write_scatter_ppm(const std::filesystem::path& path, const Eigen::MatrixXd& points, const std::vector<int>& labels,
                       double extent = 3.0, int size = 480);

}  // namespace decdm::cli
