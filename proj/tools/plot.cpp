#include "plot.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "decdm/error.hpp"
#include "decdm/io.hpp"

namespace decdm::cli {

namespace {

using Rgb = std::array<unsigned char, 3>;

constexpr std::array<Rgb, 8> kPalette{{{31, 119, 180},
                                       {255, 127, 14},
                                       {44, 160, 44},
                                       {214, 39, 40},
                                       {148, 103, 189},
                                       {140, 86, 75},
                                       {227, 119, 194},
                                       {127, 127, 127}}};

}  // namespace

void write_scatter_ppm(const std::filesystem::path& path, const Eigen::MatrixXd& points, const std::vector<int>& labels,
                       double extent, int size) {
    if (points.rows() != 2) throw ConfigError("scatter plots need 2D samples");
    std::vector<unsigned char> rgb(static_cast<std::size_t>(size) * size * 3, 255);
    auto put = [&](int r, int c, const Rgb& color) {
        if (r < 0 || c < 0 || r >= size || c >= size) return;
        auto* px = &rgb[(static_cast<std::size_t>(r) * size + c) * 3];
        px[0] = color[0];
        px[1] = color[1];
        px[2] = color[2];
    };
    const Rgb axis{210, 210, 210};
    for (int i = 0; i < size; ++i) {
        put(size / 2, i, axis);
        put(i, size / 2, axis);
    }
    const double scale = (size - 1) / (2.0 * extent);
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
        const double x = points(0, j), y = points(1, j);
        if (!(std::abs(x) <= extent && std::abs(y) <= extent)) continue;
        const int c = static_cast<int>(std::lround((x + extent) * scale));
        const int r = static_cast<int>(std::lround((extent - y) * scale));
        const int label = labels.empty() ? 0 : labels[static_cast<std::size_t>(j)];
        const Rgb& color = kPalette[static_cast<std::size_t>(label % 8 + 8) % 8];
        for (int dr = -1; dr <= 1; ++dr)
            for (int dc = -1; dc <= 1; ++dc) put(r + dr, c + dc, color);
    }
    const std::string header = "P6\n" + std::to_string(size) + " " + std::to_string(size) + "\n255\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.insert(bytes.end(), rgb.begin(), rgb.end());
    io::write_bytes(path, bytes);
}

}  // namespace decdm::cli
