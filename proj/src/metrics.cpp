#include "decdm/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "decdm/error.hpp"
#include "decdm/io.hpp"

namespace decdm {

namespace {

void require_same_dims(const GrayPatch& a, const GrayPatch& b) {
    if (a.height != b.height || a.width != b.width)
        throw ConfigError("image dimensions differ: " + std::to_string(a.height) + "x" + std::to_string(a.width) +
                          " vs " + std::to_string(b.height) + "x" + std::to_string(b.width));
}

}  // namespace

double psnr(const GrayPatch& ref, const GrayPatch& test) {
    require_same_dims(ref, test);
    double sse = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = ref.pixels[i] - test.pixels[i];
        sse += d * d;
    }
    if (sse == 0.0) return kPsnrIdentical;
    const double mse = sse / static_cast<double>(ref.size());
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const GrayPatch& ref, const GrayPatch& test, const SsimConfig& cfg) {
    require_same_dims(ref, test);
    const int win = cfg.window;
    if (win < 1 || ref.height < win || ref.width < win)
        throw ConfigError("images smaller than the " + std::to_string(win) + "x" + std::to_string(win) + " SSIM window");

    std::vector<double> kernel(static_cast<std::size_t>(win) * win);
    double total = 0.0;
    const double c = (win - 1) / 2.0;
    for (int r = 0; r < win; ++r)
        for (int q = 0; q < win; ++q) {
            const double v = std::exp(-((r - c) * (r - c) + (q - c) * (q - c)) / (2.0 * cfg.sigma * cfg.sigma));
            kernel[static_cast<std::size_t>(r) * win + q] = v;
            total += v;
        }
    for (double& v : kernel) v /= total;

    const double c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    const double c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);

    double acc = 0.0;
    long positions = 0;
    for (int r0 = 0; r0 + win <= ref.height; ++r0) {
        for (int q0 = 0; q0 + win <= ref.width; ++q0) {
            double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
            for (int r = 0; r < win; ++r)
                for (int q = 0; q < win; ++q) {
                    const double w = kernel[static_cast<std::size_t>(r) * win + q];
                    const double x = ref.at(r0 + r, q0 + q), y = test.at(r0 + r, q0 + q);
                    mx += w * x;
                    my += w * y;
                    xx += w * x * x;
                    yy += w * y * y;
                    xy += w * x * y;
                }
            const double vx = xx - mx * mx, vy = yy - my * my, cov = xy - mx * my;
            acc += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++positions;
        }
    }
    return acc / static_cast<double>(positions);
}

double cycle_l2(const Eigen::MatrixXd& original, const Eigen::MatrixXd& reconstructed) {
    if (original.cols() != reconstructed.cols()) throw ConfigError("cycle_l2 needs batches of equal size");
    if (original.rows() != reconstructed.rows()) throw ConfigError("cycle_l2 needs samples of equal shape");
    if (original.cols() == 0) return 0.0;
    return (original - reconstructed).colwise().norm().mean();
}

double manifold_proximity(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& reference, double radius) {
    if (reference.cols() == 0) throw ConfigError("manifold proximity needs a nonempty reference set");
    if (samples.rows() != reference.rows()) throw ConfigError("samples and reference differ in dimension");
    if (samples.cols() == 0) return 0.0;
    const double r2 = radius * radius;
    long within = 0;
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
        const double best = (reference.colwise() - samples.col(j)).colwise().squaredNorm().minCoeff();
        if (best <= r2) ++within;
    }
    return static_cast<double>(within) / static_cast<double>(samples.cols());
}

MetricReport evaluate_pair(const std::string& name, const GrayPatch& ref, const GrayPatch& test) {
    return {name, psnr(ref, test), ssim(ref, test), {}};
}

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricReport>& rows) {
    std::string out = "name,psnr_db,ssim,ocr_ac\n";
    char buf[64];
    for (const auto& row : rows) {
        out += row.name + ",";
        if (std::isinf(row.psnr_db)) {
            out += "inf";
        } else {
            std::snprintf(buf, sizeof buf, "%.6f", row.psnr_db);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, ",%.6f,na\n", row.ssim);
        out += buf;
    }
    io::write_text(path, out);
}

}  // namespace decdm
