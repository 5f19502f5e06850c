#include "decdm/patches.hpp"

#include <sstream>

#include "decdm/error.hpp"
#include "decdm/io.hpp"
#include "json.hpp"

namespace decdm {

namespace {

int reflect(int i, int n) {
    while (i < 0 || i >= n) i = i < 0 ? -i : 2 * n - 2 - i;
    return i;
}

GrayPatch crop(const GrayPatch& img, int r0, int c0, int h, int w) {
    GrayPatch out(h, w);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out.at(r, c) = img.at(reflect(r0 + r, img.height), reflect(c0 + c, img.width));
    return out;
}

void check_window(const GrayPatch& image, int window_h, int window_w) {
    if (window_h < 1 || window_w < 1) throw ConfigError("window must be positive");
    if (window_h > image.height || window_w > image.width)
        throw ConfigError("window " + std::to_string(window_h) + "x" + std::to_string(window_w) +
                          " larger than image " + std::to_string(image.height) + "x" + std::to_string(image.width));
}

}  // namespace

PatchGrid PatchGrid::with_patches(std::vector<GrayPatch> replacement) const {
    if (replacement.size() != origins.size()) throw ConfigError("replacement patch count does not match grid");
    for (const auto& p : replacement)
        if (p.height != window_h || p.width != window_w) throw ConfigError("replacement patch has wrong size");
    PatchGrid g = *this;
    g.patches = std::move(replacement);
    return g;
}

std::vector<int> slide_origins(int extent, int window, int stride) {
    if (stride < 1) throw ConfigError("stride must be at least 1");
    if (stride > window) throw ConfigError("stride larger than window leaves coverage holes");
    if (window > extent) throw ConfigError("window larger than image");
    std::vector<int> out;
    for (int o = 0; o + window <= extent; o += stride) out.push_back(o);
    if (out.back() + window < extent) out.push_back(extent - window);
    return out;
}

PatchGrid sub_window(const GrayPatch& image, int window_h, int window_w) {
    check_window(image, window_h, window_w);
    PatchGrid g;
    g.window_h = g.stride_h = window_h;
    g.window_w = g.stride_w = window_w;
    g.source_h = image.height;
    g.source_w = image.width;
    g.padded_h = (image.height + window_h - 1) / window_h * window_h;
    g.padded_w = (image.width + window_w - 1) / window_w * window_w;
    for (int r = 0; r < g.padded_h; r += window_h)
        for (int c = 0; c < g.padded_w; c += window_w) {
            g.origins.push_back({r, c});
            g.patches.push_back(crop(image, r, c, window_h, window_w));
        }
    return g;
}

PatchGrid slide_window(const GrayPatch& image, int window_h, int window_w, int stride_h, int stride_w) {
    check_window(image, window_h, window_w);
    PatchGrid g;
    g.window_h = window_h;
    g.window_w = window_w;
    g.stride_h = stride_h;
    g.stride_w = stride_w;
    g.source_h = g.padded_h = image.height;
    g.source_w = g.padded_w = image.width;
    const auto rows = slide_origins(image.height, window_h, stride_h);
    const auto cols = slide_origins(image.width, window_w, stride_w);
    for (int r : rows)
        for (int c : cols) {
            g.origins.push_back({r, c});
            g.patches.push_back(crop(image, r, c, window_h, window_w));
        }
    return g;
}

GrayPatch stitch(const PatchGrid& grid) {
    if (grid.patches.size() != grid.origins.size()) throw ConfigError("patch grid has mismatched origins");
    if (grid.padded_h < grid.source_h || grid.padded_w < grid.source_w || grid.source_h < 1 || grid.source_w < 1)
        throw ConfigError("patch grid has invalid dimensions");
    std::vector<double> sum(static_cast<std::size_t>(grid.padded_h) * grid.padded_w, 0.0);
    std::vector<int> count(sum.size(), 0);
    for (std::size_t k = 0; k < grid.patches.size(); ++k) {
        const GrayPatch& p = grid.patches[k];
        const PatchOrigin o = grid.origins[k];
        if (p.height != grid.window_h || p.width != grid.window_w) throw ConfigError("patch size differs from window");
        if (o.row < 0 || o.col < 0 || o.row + p.height > grid.padded_h || o.col + p.width > grid.padded_w)
            throw ConfigError("patch placed outside the grid");
        for (int r = 0; r < p.height; ++r)
            for (int c = 0; c < p.width; ++c) {
                const std::size_t idx = static_cast<std::size_t>(o.row + r) * grid.padded_w + (o.col + c);
                sum[idx] += p.at(r, c);
                ++count[idx];
            }
    }
    GrayPatch out(grid.source_h, grid.source_w);
    for (int r = 0; r < grid.source_h; ++r)
        for (int c = 0; c < grid.source_w; ++c) {
            const std::size_t idx = static_cast<std::size_t>(r) * grid.padded_w + c;
            if (count[idx] == 0)
                throw Error(ExitCode::numeric,
                            "internal error: pixel (" + std::to_string(r) + ", " + std::to_string(c) + ") not covered");
            out.at(r, c) = sum[idx] / count[idx];
        }
    return out;
}

void write_patch_manifest(const std::filesystem::path& dir, const PatchGrid& grid) {
    std::string csv = "patch_index,row,col,h,w\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        csv += std::to_string(k) + "," + std::to_string(grid.origins[k].row) + "," + std::to_string(grid.origins[k].col) +
               "," + std::to_string(grid.window_h) + "," + std::to_string(grid.window_w) + "\n";
        write_pgm(dir / ("patch_" + std::to_string(k) + ".pgm"), grid.patches[k]);
    }
    io::write_text(dir / "manifest.csv", csv);
    const nlohmann::json geometry = {
        {"window", {grid.window_h, grid.window_w}}, {"stride", {grid.stride_h, grid.stride_w}},
        {"source_dims", {grid.source_h, grid.source_w}}, {"padded_dims", {grid.padded_h, grid.padded_w}},
    };
    io::write_text(dir / "grid.json", geometry.dump(2) + "\n");
}

PatchGrid read_patch_manifest(const std::filesystem::path& dir) {
    PatchGrid g;
    try {
        const auto geometry = nlohmann::json::parse(io::read_text(dir / "grid.json"));
        g.window_h = geometry.at("window").at(0).get<int>();
        g.window_w = geometry.at("window").at(1).get<int>();
        g.stride_h = geometry.at("stride").at(0).get<int>();
        g.stride_w = geometry.at("stride").at(1).get<int>();
        g.source_h = geometry.at("source_dims").at(0).get<int>();
        g.source_w = geometry.at("source_dims").at(1).get<int>();
        g.padded_h = geometry.at("padded_dims").at(0).get<int>();
        g.padded_w = geometry.at("padded_dims").at(1).get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("patch grid geometry: ") + e.what());
    }
    std::istringstream in(io::read_text(dir / "manifest.csv"));
    std::string line;
    std::getline(in, line);
    if (line.rfind("patch_index,row,col,h,w", 0) != 0) throw ProtocolError("patch manifest: unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        int v[5];
        for (int k = 0; k < 5; ++k) {
            if (!std::getline(row, cell, ',')) throw ProtocolError("patch manifest: short row '" + line + "'");
            try {
                v[k] = std::stoi(cell);
            } catch (const std::exception&) {
                throw ProtocolError("patch manifest: bad number in row '" + line + "'");
            }
        }
        if (v[0] != static_cast<int>(g.origins.size())) throw ProtocolError("patch manifest: indices out of order");
        if (v[3] != g.window_h || v[4] != g.window_w) throw ProtocolError("patch manifest: patch size differs from grid");
        g.origins.push_back({v[1], v[2]});
        GrayPatch p = read_pgm(dir / ("patch_" + std::to_string(v[0]) + ".pgm"));
        if (p.height != g.window_h || p.width != g.window_w) throw ProtocolError("patch image has wrong size");
        g.patches.push_back(std::move(p));
    }
    return g;
}

Eigen::MatrixXd patches_to_samples(const std::vector<GrayPatch>& patches) {
    if (patches.empty()) return {};
    const Eigen::Index dim = static_cast<Eigen::Index>(patches.front().size());
    Eigen::MatrixXd out(dim, static_cast<Eigen::Index>(patches.size()));
    for (std::size_t j = 0; j < patches.size(); ++j) {
        if (static_cast<Eigen::Index>(patches[j].size()) != dim) throw ConfigError("patches differ in size");
        out.col(static_cast<Eigen::Index>(j)) = 2.0 * patches[j].flatten().array() - 1.0;
    }
    return out;
}

std::vector<GrayPatch> samples_to_patches(const Eigen::MatrixXd& samples, int h, int w) {
    if (samples.rows() != static_cast<Eigen::Index>(h) * w)
        throw ConfigError("sample dimension does not match the " + std::to_string(h) + "x" + std::to_string(w) + " patch");
    std::vector<GrayPatch> out;
    out.reserve(static_cast<std::size_t>(samples.cols()));
    for (Eigen::Index j = 0; j < samples.cols(); ++j) {
        const Eigen::VectorXd v = ((samples.col(j).array() + 1.0) * 0.5).cwiseMax(0.0).cwiseMin(1.0);
        out.push_back(GrayPatch::from_flat(v, h, w));
    }
    return out;
}

}  // namespace decdm
