#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "decdm/image.hpp"

namespace decdm {

struct PatchOrigin {
    int row = 0;
    int col = 0;
    friend bool operator==(const PatchOrigin&, const PatchOrigin&) = default;
};

/// A tiling of one image into equally sized windows.
///
/// Sub-window grids tile without overlap; when the image is not a multiple
/// of the window, the image is reflection-padded on the bottom/right and the
/// padded size is recorded. Slide-window grids overlap and never pad: their
/// last row/column of origins is clamped to end at the image edge.
struct PatchGrid {
    std::vector<GrayPatch> patches;
    std::vector<PatchOrigin> origins;
    int window_h = 0, window_w = 0;
    int stride_h = 0, stride_w = 0;
    int source_h = 0, source_w = 0;
    int padded_h = 0, padded_w = 0;  // equal to source dims unless padded

    std::size_t size() const { return patches.size(); }
    /// Same geometry with different patch contents.
    PatchGrid with_patches(std::vector<GrayPatch> replacement) const;
};

/// Non-overlapping tiling: ceil(H/h) * ceil(W/w) patches.
PatchGrid sub_window(const GrayPatch& image, int window_h, int window_w);

/// Origins at every stride multiple plus a final clamped origin per axis.
/// Requires 1 <= stride <= window <= image size.
PatchGrid slide_window(const GrayPatch& image, int window_h, int window_w, int stride_h, int stride_w);

/// Mean of all patch values covering each pixel, cropped to the source size.
GrayPatch stitch(const PatchGrid& grid);

/// Window origins along one axis of length `extent`.
std::vector<int> slide_origins(int extent, int window, int stride);

/// Writes manifest.csv (patch_index,row,col,h,w), grid.json with the grid
/// geometry and one patch_<index>.pgm per patch into `dir`.
/// Patch-domain models see intensities mapped from [0, 1] to [-1, 1], one
/// flattened patch per column.
Eigen::MatrixXd patches_to_samples(const std::vector<GrayPatch>& patches);
/// Inverse of patches_to_samples; values are clamped back into [0, 1].
std::vector<GrayPatch> samples_to_patches(const Eigen::MatrixXd& samples, int h, int w);

void write_patch_manifest(const std::filesystem::path& dir, const PatchGrid& grid);
PatchGrid read_patch_manifest(const std::filesystem::path& dir);

}  // namespace decdm
