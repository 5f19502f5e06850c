#include "decdm/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "decdm/error.hpp"
#include "decdm/io.hpp"

namespace decdm {

GrayPatch::GrayPatch(int h, int w, double fill) : height(h), width(w) {
    if (h <= 0 || w <= 0) throw ConfigError("image dimensions must be positive");
    pixels.assign(static_cast<std::size_t>(h) * w, fill);
}

Eigen::VectorXd GrayPatch::flatten() const {
    return Eigen::Map<const Eigen::VectorXd>(pixels.data(), static_cast<Eigen::Index>(pixels.size()));
}

GrayPatch GrayPatch::from_flat(const Eigen::Ref<const Eigen::VectorXd>& v, int h, int w) {
    if (v.size() != static_cast<Eigen::Index>(h) * w)
        throw ConfigError("flat vector length does not match image dimensions");
    GrayPatch p(h, w);
    for (Eigen::Index i = 0; i < v.size(); ++i) p.pixels[static_cast<std::size_t>(i)] = v[i];
    return p;
}

unsigned char to_byte(double v) {
    return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

void write_pgm(const std::filesystem::path& path, const GrayPatch& img) {
    std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    std::vector<unsigned char> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + img.size());
    for (double v : img.pixels) bytes.push_back(to_byte(v));
    io::write_bytes(path, bytes);
}

GrayPatch read_pgm(const std::filesystem::path& path) {
    const auto bytes = io::read_bytes(path);
    std::size_t pos = 0;
    auto next_token = [&]() {
        while (pos < bytes.size()) {
            if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else if (std::isspace(bytes[pos])) {
                ++pos;
            } else {
                break;
            }
        }
        std::string tok;
        while (pos < bytes.size() && !std::isspace(bytes[pos])) tok += static_cast<char>(bytes[pos++]);
        return tok;
    };
    if (next_token() != "P5") throw ProtocolError("not a binary PGM: " + path.string());
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token());
        h = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        throw ProtocolError("malformed PGM header: " + path.string());
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
        throw ProtocolError("unsupported PGM geometry or depth: " + path.string());
    ++pos;  // single whitespace after maxval
    if (bytes.size() < pos + static_cast<std::size_t>(w) * h)
        throw ProtocolError("truncated PGM payload: " + path.string());
    GrayPatch img(h, w);
    for (std::size_t i = 0; i < img.size(); ++i) img.pixels[i] = bytes[pos + i] / static_cast<double>(maxval);
    return img;
}

}  // namespace decdm
