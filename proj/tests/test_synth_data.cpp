#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <Eigen/LU>

#include "doctest.h"

#include "decdm/error.hpp"
#include "decdm/synth_data.hpp"
#include "test_util.hpp"

using namespace decdm;

namespace {

Eigen::Matrix2d covariance(const Eigen::Matrix2Xd& pts) {
    const Eigen::Vector2d mean = pts.rowwise().mean();
    const Eigen::Matrix2Xd c = pts.colwise() - mean;
    return c * c.transpose() / static_cast<double>(pts.cols());
}

}  // namespace

TEST_CASE("make_dataset whitens every generator") {
    for (Domain d : {Domain::TM, Domain::CB, Domain::CR, Domain::CS, Domain::PR, Domain::PS}) {
        for (Eigen::Index n : {256, 4096}) {
            const PointSet ps = make_dataset(d, n, 7);
            CAPTURE(domain_name(d));
            CAPTURE(n);
            REQUIRE(ps.size() == n);
            REQUIRE(ps.labels.size() == static_cast<std::size_t>(n));
            CHECK(ps.points.rowwise().mean().cwiseAbs().maxCoeff() <= 1e-6);
            CHECK((covariance(ps.points) - Eigen::Matrix2d::Identity()).norm() <= 1e-6);
        }
    }
}

TEST_CASE("labels count the configured rings") {
    const PointSet ps = make_dataset(Domain::CR, 2000, 1);
    const std::set<int> distinct(ps.labels.begin(), ps.labels.end());
    CHECK(static_cast<int>(distinct.size()) == label_count(Domain::CR));
    CHECK(distinct.size() == 3);

    ShapeConfig five;
    five.radii = {0.2, 0.4, 0.6, 0.8, 1.0};
    const PointSet more = make_dataset(Domain::CR, 2000, 1, five);
    CHECK(std::set<int>(more.labels.begin(), more.labels.end()).size() == 5);
}

TEST_CASE("a single point uses the reference whitener") {
    const PointSet one = make_dataset(Domain::CB, 1, 0);
    REQUIRE(one.size() == 1);
    CHECK(one.points.allFinite());
    const AffineWhitener ref = reference_whitener(Domain::CB);
    const PointSet raw = sample_raw(Domain::CB, 1, 0);
    CHECK((ref.apply(raw.points) - one.points).norm() == 0.0);
}

TEST_CASE("generators are deterministic and seed-sensitive") {
    const PointSet a = make_dataset(Domain::TM, 512, 3), b = make_dataset(Domain::TM, 512, 3);
    const PointSet c = make_dataset(Domain::TM, 512, 4);
    CHECK(a.points == b.points);
    CHECK(a.labels == b.labels);
    CHECK(a.points != c.points);
}

TEST_CASE("whitening keeps labels") {
    const PointSet raw = sample_raw(Domain::PS, 1000, 5);
    const auto [white, w] = whiten(raw);
    CHECK(white.labels == raw.labels);
}

TEST_CASE("whiten: idempotence, isotropic scaling and inversion") {
    const PointSet white = make_dataset(Domain::CS, 3000, 2);
    const auto again = whiten(white).second;
    CHECK((again.transform - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(again.mean.cwiseAbs().maxCoeff() <= 1e-6);

    PointSet scaled = white;
    scaled.points *= 3.0;
    const auto third = whiten(scaled).second;
    CHECK((third.transform - Eigen::Matrix2d::Identity() / 3.0).cwiseAbs().maxCoeff() <= 1e-6);

    const PointSet raw = sample_raw(Domain::TM, 500, 9);
    const auto [w_pts, w] = whiten(raw);
    CHECK((w.invert(w_pts.points) - raw.points).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(std::abs(w.transform.determinant()) > 0.0);
}

TEST_CASE("whiten rejects degenerate inputs") {
    PointSet two;
    two.points.resize(2, 2);
    two.points << 0.0, 1.0, 0.0, 1.0;
    two.labels = {0, 0};
    CHECK_THROWS_AS(whiten(two), ConfigError);

    PointSet line;
    line.points.resize(2, 4);
    line.points << 0.0, 1.0, 2.0, 3.0, 0.0, 2.0, 4.0, 6.0;
    line.labels.assign(4, 0);
    try {
        (void)whiten(line);
        FAIL("collinear points were accepted");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("condition number") != std::string::npos);
    }
}

TEST_CASE("unknown dataset kind is a configuration error") {
    CHECK_THROWS_AS(parse_domain("spiral"), ConfigError);
    CHECK(parse_domain("cr") == Domain::CR);
    CHECK(parse_domain("Ps") == Domain::PS);
}

TEST_CASE("render_strokes") {
    const GrayPatch p = render_strokes(0, 64, 64, 0.1);
    const auto dark = std::count_if(p.pixels.begin(), p.pixels.end(), [](double v) { return v < 0.5; });
    const double frac = static_cast<double>(dark) / static_cast<double>(p.size());
    CHECK(frac >= 0.02);
    CHECK(frac <= 0.3);
    CHECK(*std::min_element(p.pixels.begin(), p.pixels.end()) == doctest::Approx(0.0));
    CHECK(*std::max_element(p.pixels.begin(), p.pixels.end()) == 1.0);

    CHECK(render_strokes(0, 64, 64, 0.25) == render_strokes(0, 64, 64, 0.25));

    StrokeConfig none;
    none.min_strokes = 0;
    const GrayPatch blank = render_strokes(0, 32, 32, 1e-6, none);
    CHECK(std::all_of(blank.pixels.begin(), blank.pixels.end(), [](double v) { return v == 1.0; }));

    CHECK_THROWS_AS(render_strokes(0, 4, 64, 0.1), ConfigError);
    CHECK_THROWS_AS(render_strokes(0, 64, 64, 1.0), ConfigError);
}

TEST_CASE("degrade") {
    const GrayPatch clean = render_strokes(3, 32, 32, 0.2);
    CHECK(degrade(clean, {0.0, 0.0, 11}) == clean);

    // Mid-gray keeps the noise away from the clamp.
    const GrayPatch gray(256, 256, 0.5);
    const GrayPatch noisy = degrade(gray, {5.0, 0.0, 4});
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < gray.size(); ++i) {
        const double d = noisy.pixels[i] - gray.pixels[i];
        sum += d;
        sq += d * d;
    }
    const double n = static_cast<double>(gray.size());
    const double sd = std::sqrt(sq / n - (sum / n) * (sum / n));
    CHECK(sd == doctest::Approx(5.0 / 255.0).epsilon(0.1));

    const GrayPatch zeros(16, 16, 0.0);
    CHECK(degrade(zeros, {0.0, 5.0, 2}) == zeros);

    const GrayPatch both = degrade(clean, {20.0, 20.0, 8});
    CHECK(std::all_of(both.pixels.begin(), both.pixels.end(), [](double v) { return v >= 0.0 && v <= 1.0; }));
    CHECK_THROWS_AS(degrade(clean, {-1.0, 0.0, 0}), ConfigError);
}

TEST_CASE("point CSV round trip") {
    test::TempDir dir;
    const PointSet ps = make_dataset(Domain::PR, 100, 5);
    write_point_csv(dir.path / "pr.csv", ps);
    const PointSet back = read_point_csv(dir.path / "pr.csv");
    CHECK(back.points == ps.points);
    CHECK(back.labels == ps.labels);
}
