#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "decdm/image.hpp"

namespace decdm {

/// The six 2D benchmark domains: two moons, checkerboard, concentric rings,
/// concentric squares, parallel rings, parallel squares.
enum class Domain { TM, CB, CR, CS, PR, PS };

std::string_view domain_name(Domain d);
/// Case-insensitive parse of "tm", "cb", ...; throws ConfigError otherwise.
Domain parse_domain(std::string_view name);

struct PointSet {
    Eigen::Matrix2Xd points;   // one point per column
    std::vector<int> labels;   // identity/color index per point
    Domain domain = Domain::TM;

    Eigen::Index size() const { return points.cols(); }
};

/// x -> transform * (x - mean). transform is the inverse Cholesky factor of
/// the covariance it was fitted on.
struct AffineWhitener {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d transform = Eigen::Matrix2d::Identity();

    Eigen::Matrix2Xd apply(const Eigen::Matrix2Xd& x) const;
    Eigen::Matrix2Xd invert(const Eigen::Matrix2Xd& y) const;
};

/// Shape parameters. The defaults are the configuration the test-suite and
/// acceptance runs use; none of them is canonical.
struct ShapeConfig {
    double jitter = 0.05;
    // two moons
    double moon_radius = 1.0;
    Eigen::Vector2d moon_offset{1.0, -0.5};
    // checkerboard: cells x cells grid over [-cells/2, cells/2]^2, filled cells only
    int checker_cells = 4;
    // concentric rings / squares (radius or half side)
    std::vector<double> radii{0.5, 1.0, 1.5};
    // parallel rings / squares: `parallel_count` shapes of `parallel_radius`
    // spaced `parallel_spacing` apart along x
    int parallel_count = 3;
    double parallel_radius = 0.5;
    double parallel_spacing = 1.5;
};

/// Number of distinct labels the generator for `kind` emits under `cfg`.
int label_count(Domain kind, const ShapeConfig& cfg = {});

/// Raw (unwhitened) samples from the named shape family.
PointSet sample_raw(Domain kind, Eigen::Index n, std::uint64_t seed, const ShapeConfig& cfg = {});

/// Fits mean/covariance on `raw` and whitens it. Needs at least 3 points and a
/// non-singular covariance; throws ConfigError / NumericError otherwise.
std::pair<PointSet, AffineWhitener> whiten(const PointSet& raw);

/// Whitener fitted on a large fixed-seed reference draw of the distribution,
/// used when a requested set is too small to fit its own.
AffineWhitener reference_whitener(Domain kind, const ShapeConfig& cfg = {});

/// n whitened points of the named family. Sets of 3 or more points are
/// whitened on themselves; smaller ones use reference_whitener.
PointSet make_dataset(Domain kind, Eigen::Index n, std::uint64_t seed, const ShapeConfig& cfg = {});

struct StrokeConfig {
    int min_strokes = 1;
    double half_width = 0.75;       // stroke half thickness in pixels
    double softness = 0.5;          // anti-aliasing ramp in pixels
    double mean_stroke_area = 24.0; // expected dark pixels per stroke, sets stroke count
};

/// White patch with dark random line and arc strokes. Deterministic in seed.
GrayPatch render_strokes(std::uint64_t seed, int h, int w, double density, const StrokeConfig& cfg = {});

/// Sigmas are standard deviations on the 0-255 intensity scale.
struct DegradeConfig {
    double gaussian_sigma = 5.0;
    double speckle_sigma = 5.0;
    std::uint64_t seed = 0;
};

/// clamp(clean * (1 + eta) + eps), eta ~ N(0, speckle^2), eps ~ N(0, gaussian^2).
GrayPatch degrade(const GrayPatch& clean, const DegradeConfig& cfg);

/// CSV with header x,y,label.
void write_point_csv(const std::filesystem::path& path, const PointSet& ps);
PointSet read_point_csv(const std::filesystem::path& path);

}  // namespace decdm
