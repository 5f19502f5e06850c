#include "decdm/synth_data.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "decdm/error.hpp"
#include "decdm/rng.hpp"
#include "decdm/samples.hpp"

namespace decdm {

namespace {

constexpr std::array<std::string_view, 6> kDomainNames{"TM", "CB", "CR", "CS", "PR", "PS"};
constexpr std::uint64_t kReferenceSeed = 0x5EEDu;
constexpr Eigen::Index kReferenceSize = 1 << 16;

// Uniform point on the perimeter of an axis-aligned square of half side a.
Eigen::Vector2d square_perimeter(Rng& rng, double a) {
    const double u = rng.uniform(0.0, 4.0);
    const int side = std::min(3, static_cast<int>(u));
    const double s = (u - side) * 2.0 * a - a;
    switch (side) {
        case 0: return {s, -a};
        case 1: return {a, s};
        case 2: return {-s, a};
        default: return {-a, -s};
    }
}

Eigen::Vector2d ring_point(Rng& rng, double r) {
    const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

std::string_view domain_name(Domain d) { return kDomainNames[static_cast<std::size_t>(d)]; }

Domain parse_domain(std::string_view name) {
    std::string upper(name);
    for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (std::size_t i = 0; i < kDomainNames.size(); ++i)
        if (kDomainNames[i] == upper) return static_cast<Domain>(i);
    throw ConfigError("unknown dataset kind '" + std::string(name) + "' (expected tm, cb, cr, cs, pr, ps)");
}

Eigen::Matrix2Xd AffineWhitener::apply(const Eigen::Matrix2Xd& x) const {
    return transform * (x.colwise() - mean);
}

Eigen::Matrix2Xd AffineWhitener::invert(const Eigen::Matrix2Xd& y) const {
    return (transform.inverse() * y).colwise() + mean;
}

int label_count(Domain kind, const ShapeConfig& cfg) {
    switch (kind) {
        case Domain::TM: return 2;
        case Domain::CB: return cfg.checker_cells * cfg.checker_cells / 2 + (cfg.checker_cells % 2);
        case Domain::CR:
        case Domain::CS: return static_cast<int>(cfg.radii.size());
        case Domain::PR:
        case Domain::PS: return cfg.parallel_count;
    }
    return 0;
}

PointSet sample_raw(Domain kind, Eigen::Index n, std::uint64_t seed, const ShapeConfig& cfg) {
    if (n < 1) throw ConfigError("dataset size must be at least 1");
    if ((kind == Domain::CR || kind == Domain::CS) && cfg.radii.empty())
        throw ConfigError("concentric shapes need at least one radius");
    if ((kind == Domain::PR || kind == Domain::PS) && cfg.parallel_count < 1)
        throw ConfigError("parallel shapes need a positive count");
    if (kind == Domain::CB && cfg.checker_cells < 1) throw ConfigError("checkerboard needs at least one cell");

    Rng rng(seed);
    PointSet ps;
    ps.domain = kind;
    ps.points.resize(2, n);
    ps.labels.resize(static_cast<std::size_t>(n));

    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Vector2d p;
        int label = 0;
        switch (kind) {
            case Domain::TM: {
                label = static_cast<int>(rng.integer(0, 1));
                const double theta = rng.uniform(0.0, std::numbers::pi);
                const double r = cfg.moon_radius;
                if (label == 0) p = {r * std::cos(theta), r * std::sin(theta)};
                else p = {cfg.moon_offset.x() - r * std::cos(theta), cfg.moon_offset.y() + r - r * std::sin(theta)};
                break;
            }
            case Domain::CB: {
                const int cells = cfg.checker_cells;
                const int filled = label_count(Domain::CB, cfg);
                label = static_cast<int>(rng.integer(0, filled - 1));
                // filled cells are those with (row + col) even, enumerated row-major
                int seen = 0, row = 0, col = 0;
                for (int k = 0; k < cells * cells; ++k) {
                    if (((k / cells) + (k % cells)) % 2 != 0) continue;
                    if (seen++ == label) {
                        row = k / cells;
                        col = k % cells;
                        break;
                    }
                }
                const double half = cells / 2.0;
                p = {col - half + rng.uniform(), row - half + rng.uniform()};
                break;
            }
            case Domain::CR:
            case Domain::CS: {
                label = static_cast<int>(rng.integer(0, static_cast<std::int64_t>(cfg.radii.size()) - 1));
                const double r = cfg.radii[static_cast<std::size_t>(label)];
                p = kind == Domain::CR ? ring_point(rng, r) : square_perimeter(rng, r);
                break;
            }
            case Domain::PR:
            case Domain::PS: {
                label = static_cast<int>(rng.integer(0, cfg.parallel_count - 1));
                const double cx = (label - (cfg.parallel_count - 1) / 2.0) * cfg.parallel_spacing;
                p = kind == Domain::PR ? ring_point(rng, cfg.parallel_radius)
                                       : square_perimeter(rng, cfg.parallel_radius);
                p.x() += cx;
                break;
            }
        }
        if (kind != Domain::CB) {
            p.x() += cfg.jitter * rng.normal();
            p.y() += cfg.jitter * rng.normal();
        }
        ps.points.col(i) = p;
        ps.labels[static_cast<std::size_t>(i)] = label;
    }
    return ps;
}

std::pair<PointSet, AffineWhitener> whiten(const PointSet& raw) {
    const Eigen::Index n = raw.size();
    if (n < 3) throw ConfigError("whitening needs at least 3 points, got " + std::to_string(n));

    AffineWhitener w;
    w.mean = raw.points.rowwise().mean();
    const Eigen::Matrix2Xd centered = raw.points.colwise() - w.mean;
    const Eigen::Matrix2d cov = centered * centered.transpose() / static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(cov, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues()(0), hi = eig.eigenvalues()(1);
    if (!(lo > 1e-12 * hi) || !(hi > 0.0)) {
        std::ostringstream msg;
        msg << "singular covariance (eigenvalues " << lo << ", " << hi << "; condition number "
            << (lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) << ")";
        throw NumericError(msg.str());
    }
    Eigen::LLT<Eigen::Matrix2d> llt(cov);
    if (llt.info() != Eigen::Success) throw NumericError("Cholesky factorization of covariance failed");
    const Eigen::Matrix2d lower = llt.matrixL();
    w.transform = lower.inverse();

    PointSet out;
    out.domain = raw.domain;
    out.labels = raw.labels;
    out.points = w.apply(raw.points);
    return {std::move(out), w};
}

AffineWhitener reference_whitener(Domain kind, const ShapeConfig& cfg) {
    return whiten(sample_raw(kind, kReferenceSize, kReferenceSeed, cfg)).second;
}

PointSet make_dataset(Domain kind, Eigen::Index n, std::uint64_t seed, const ShapeConfig& cfg) {
    PointSet raw = sample_raw(kind, n, seed, cfg);
    if (n >= 3) {
        try {
            return whiten(raw).first;
        } catch (const NumericError&) {
            // tiny degenerate draws (e.g. three collinear points) fall through
        }
    }
    const AffineWhitener w = reference_whitener(kind, cfg);
    raw.points = w.apply(raw.points);
    return raw;
}

GrayPatch render_strokes(std::uint64_t seed, int h, int w, double density, const StrokeConfig& cfg) {
    if (h < 8 || w < 8) throw ConfigError("stroke patches must be at least 8x8");
    if (!(density > 0.0 && density < 1.0)) throw ConfigError("stroke density must lie in (0, 1)");
    if (cfg.min_strokes < 0 || cfg.mean_stroke_area <= 0.0) throw ConfigError("invalid stroke configuration");

    Rng rng(seed);
    GrayPatch patch(h, w, 1.0);
    const int count = std::max(cfg.min_strokes,
                               static_cast<int>(std::lround(density * h * w / cfg.mean_stroke_area)));
    const double span = std::min(h, w);

    for (int s = 0; s < count; ++s) {
        // Each stroke is a polyline: a straight segment or a sampled arc.
        std::vector<Eigen::Vector2d> poly;
        if (rng.uniform() < 0.6) {
            const Eigen::Vector2d a{rng.uniform(0.0, w), rng.uniform(0.0, h)};
            const double len = rng.uniform(0.15, 0.45) * span;
            const double ang = rng.uniform(0.0, 2.0 * std::numbers::pi);
            poly = {a, a + len * Eigen::Vector2d{std::cos(ang), std::sin(ang)}};
        } else {
            const Eigen::Vector2d c{rng.uniform(0.0, w), rng.uniform(0.0, h)};
            const double r = rng.uniform(0.08, 0.25) * span;
            const double a0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double sweep = rng.uniform(0.5, 1.5) * std::numbers::pi;
            constexpr int kSegments = 16;
            for (int k = 0; k <= kSegments; ++k) {
                const double a = a0 + sweep * k / kSegments;
                poly.push_back(c + r * Eigen::Vector2d{std::cos(a), std::sin(a)});
            }
        }
        for (int row = 0; row < h; ++row) {
            for (int col = 0; col < w; ++col) {
                const Eigen::Vector2d p{col + 0.5, row + 0.5};
                double dist = std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k + 1 < poly.size(); ++k) {
                    const Eigen::Vector2d ab = poly[k + 1] - poly[k];
                    const double denom = ab.squaredNorm();
                    const double t = denom > 0.0 ? std::clamp((p - poly[k]).dot(ab) / denom, 0.0, 1.0) : 0.0;
                    dist = std::min(dist, (p - poly[k] - t * ab).norm());
                }
                const double ink = std::clamp((dist - cfg.half_width) / cfg.softness, 0.0, 1.0);
                patch.at(row, col) = std::min(patch.at(row, col), ink);
            }
        }
    }
    return patch;
}

GrayPatch degrade(const GrayPatch& clean, const DegradeConfig& cfg) {
    if (cfg.gaussian_sigma < 0.0 || cfg.speckle_sigma < 0.0) throw ConfigError("noise sigmas must be non-negative");
    const double gauss = cfg.gaussian_sigma / 255.0;
    const double speckle = cfg.speckle_sigma / 255.0;
    Rng rng(cfg.seed);
    GrayPatch out = clean;
    for (double& v : out.pixels) {
        const double eta = speckle * rng.normal();
        const double eps = gauss * rng.normal();
        v = std::clamp(v * (1.0 + eta) + eps, 0.0, 1.0);
    }
    return out;
}

void write_point_csv(const std::filesystem::path& path, const PointSet& ps) {
    write_sample_csv(path, SampleTable{ps.points, ps.labels});
}

PointSet read_point_csv(const std::filesystem::path& path) {
    SampleTable t = read_sample_csv(path);
    if (t.values.rows() != 2) throw ProtocolError(path.string() + ": expected 2D points (x,y columns)");
    PointSet ps;
    ps.points = t.values;
    ps.labels = t.labels.empty() ? std::vector<int>(static_cast<std::size_t>(t.values.cols()), 0) : t.labels;
    return ps;
}

}  // namespace decdm
