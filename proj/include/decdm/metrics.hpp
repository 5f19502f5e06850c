#pragma once

#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "decdm/image.hpp"

namespace decdm {

/// Returned by psnr() when the images are identical.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE) for images on the unit intensity scale.
double psnr(const GrayPatch& ref, const GrayPatch& test);

struct SsimConfig {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean SSIM over every position where the Gaussian window fits inside the image.
double ssim(const GrayPatch& ref, const GrayPatch& test, const SsimConfig& cfg = {});

/// Mean over samples (columns) of the Euclidean distance between the batches.
double cycle_l2(const Eigen::MatrixXd& original, const Eigen::MatrixXd& reconstructed);

/// Fraction of samples whose nearest reference point lies within `radius`.
double manifold_proximity(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& reference, double radius);

struct MetricReport {
    std::string name;
    double psnr_db = 0.0;
    double ssim = 0.0;
    std::string notes;
};

MetricReport evaluate_pair(const std::string& name, const GrayPatch& ref, const GrayPatch& test);

/// name,psnr_db,ssim,ocr_ac rows; identical pairs print "inf". OCR accuracy is
/// not computed and is always "na".
void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricReport>& rows);

}  // namespace decdm
