#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace decdm {

/// Grayscale image with intensities in [0, 1], row-major.
struct GrayPatch {
    int height = 0;
    int width = 0;
    std::vector<double> pixels;

    GrayPatch() = default;
    GrayPatch(int h, int w, double fill = 0.0);

    double& at(int r, int c) { return pixels[static_cast<std::size_t>(r) * width + c]; }
    double at(int r, int c) const { return pixels[static_cast<std::size_t>(r) * width + c]; }
    std::size_t size() const { return pixels.size(); }

    /// Flattened column vector, as fed to a patch-domain model.
    Eigen::VectorXd flatten() const;
    static GrayPatch from_flat(const Eigen::Ref<const Eigen::VectorXd>& v, int h, int w);

    friend bool operator==(const GrayPatch&, const GrayPatch&) = default;
};

/// Binary PGM (P5, maxval 255). Values are clamped to [0,1] and rounded.
void write_pgm(const std::filesystem::path& path, const GrayPatch& img);
GrayPatch read_pgm(const std::filesystem::path& path);

/// 8-bit quantization used by the PGM writer.
unsigned char to_byte(double v);

}  // namespace decdm
