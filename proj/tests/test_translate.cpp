#include <algorithm>
#include <cstring>

#include "doctest.h"

#include "decdm/checkpoint.hpp"
#include "decdm/error.hpp"
#include "decdm/samples.hpp"
#include "decdm/translate.hpp"
#include "test_util.hpp"

using namespace decdm;

namespace {

DenoiserModel untrained(const NoiseSchedule& s, std::string tag, std::uint64_t seed) {
    DenoiserModel m;
    m.schedule = s;
    m.domain_tag = std::move(tag);
    m.data_shape = {2};
    m.network = std::make_shared<MlpEpsNetwork>(Mlp<float>::initialized(MlpArch{2, {16, 16}, 8}, seed));
    return m;
}

Eigen::MatrixXd gaussian(int dim, int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(dim, n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    return x;
}

bool contains(const std::vector<std::filesystem::path>& v, const std::filesystem::path& p) {
    return std::find(v.begin(), v.end(), p) != v.end();
}

}  // namespace

TEST_CASE("zero-predictor cycle is exact") {
    const NoiseSchedule s = make_schedule(1000);
    const DomainPair pair{make_stub_model(s, {2}, Eigen::VectorXd::Zero(2), "a"),
                          make_stub_model(s, {2}, Eigen::VectorXd::Zero(2), "b")};
    const Eigen::MatrixXd x = gaussian(2, 256, 1);
    CycleTrace trace;
    const CycleReport r = cycle_check(x, pair, kDefaultDdimSteps, &trace);
    CHECK(r.mean_source_l2 <= 1e-12 * x.colwise().norm().mean());
    CHECK(r.mean_latent_l2 <= 1e-12 * trace.latent.colwise().norm().mean());
    CHECK(r.per_sample_source_l2.size() == 256);
    CHECK(r.source_name == "a");
    CHECK(r.target_name == "b");
    CHECK((trace.translated - x).norm() <= 1e-12 * x.norm());
}

TEST_CASE("swapping the pair swaps the cycle direction") {
    const NoiseSchedule s = make_schedule(100);
    const DomainPair pair{untrained(s, "a", 1), untrained(s, "b", 2)};
    const Eigen::MatrixXd x = gaussian(2, 16, 3);
    const CycleReport fwd = cycle_check(x, pair, 20), back = cycle_check(x, pair.swapped(), 20);
    CHECK(back.source_name == "b");
    CHECK(fwd.mean_source_l2 != back.mean_source_l2);
    CHECK(cycle_check(x, pair, 20).per_sample_source_l2 == fwd.per_sample_source_l2);
}

TEST_CASE("pair validation") {
    const DomainPair mismatch{make_stub_model(make_schedule(100), {2}, Eigen::VectorXd::Zero(2)),
                              make_stub_model(make_schedule(100), {3}, Eigen::VectorXd::Zero(3))};
    CHECK_THROWS_AS(mismatch.validate(), ConfigError);
    const DomainPair horizons{make_stub_model(make_schedule(100), {2}, Eigen::VectorXd::Zero(2)),
                              make_stub_model(make_schedule(50), {2}, Eigen::VectorXd::Zero(2))};
    CHECK_THROWS_AS(horizons.validate(), ConfigError);
}

TEST_CASE("cycle CSV") {
    const NoiseSchedule s = make_schedule(100);
    const DomainPair pair{untrained(s, "a", 1), untrained(s, "b", 2)};
    const CycleReport r = cycle_check(gaussian(2, 3, 4), pair, 10);
    test::TempDir dir;
    write_cycle_csv(dir.path / "c.csv", r);
    const std::string text = io::read_text(dir.path / "c.csv");
    CHECK(text.rfind("sample_id,latent_l2,source_l2\n0,", 0) == 0);
    CHECK(text.find("\nmean,") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}

TEST_CASE("two-party pipeline matches in-process translation") {
    const NoiseSchedule s = make_schedule(100);
    const DomainPair pair{untrained(s, "src", 11), untrained(s, "tgt", 12)};
    const Eigen::MatrixXd x = gaussian(2, 50, 7);

    test::TempDir dir;
    const auto a = dir.path / "party_a", b = dir.path / "party_b", wire = dir.path / "wire";
    write_sample_csv(a / "source.csv", SampleTable{x, {}});
    save_checkpoint(a / "source.ckpt", pair.source);
    save_checkpoint(b / "target.ckpt", pair.target);

    const auto enc = party_encode(PartyRole::EncoderA, a / "source.csv", a / "source.ckpt", wire / "z.bin", 40);
    const auto dec = party_decode(PartyRole::DecoderB, wire / "z.bin", b / "target.ckpt", b / "out.csv");

    const Eigen::MatrixXd expected = translate(read_sample_csv(a / "source.csv").values, pair, 40);
    CHECK(read_sample_csv(b / "out.csv").values == expected);

    auto paths = [](const std::vector<io::AccessRecord>& recs, io::AccessRecord::Kind kind) {
        std::vector<std::filesystem::path> out;
        for (const auto& r : recs)
            if (r.kind == kind) out.push_back(r.path);
        return out;
    };
    const auto enc_reads = paths(enc, io::AccessRecord::Kind::read);
    const auto dec_reads = paths(dec, io::AccessRecord::Kind::read);
    CHECK(contains(enc_reads, a / "source.csv"));
    CHECK(contains(paths(enc, io::AccessRecord::Kind::write), wire / "z.bin"));
    CHECK(dec_reads.size() == 2);
    CHECK(contains(dec_reads, wire / "z.bin"));
    CHECK(contains(dec_reads, b / "target.ckpt"));
    for (const auto& p : enc_reads) CHECK(!contains(dec_reads, p));
    for (const auto& p : enc_reads) CHECK(p.parent_path() == a);
}

TEST_CASE("party protocol violations") {
    const NoiseSchedule s = make_schedule(100);
    test::TempDir dir;
    write_sample_csv(dir.path / "x.csv", SampleTable{gaussian(2, 4, 1), {}});
    save_checkpoint(dir.path / "src.ckpt", untrained(s, "src", 1));
    save_checkpoint(dir.path / "cos.ckpt", untrained(make_schedule(100, ScheduleKind::cosine), "cos", 2));

    CHECK_THROWS_AS(party_encode(PartyRole::DecoderB, dir.path / "x.csv", dir.path / "src.ckpt", dir.path / "z"),
                    ProtocolError);
    // A binary file in place of raw samples.
    CHECK_THROWS_AS(party_encode(PartyRole::EncoderA, dir.path / "src.ckpt", dir.path / "src.ckpt", dir.path / "z"),
                    ProtocolError);

    party_encode(PartyRole::EncoderA, dir.path / "x.csv", dir.path / "src.ckpt", dir.path / "z.bin", 10);
    CHECK_THROWS_AS(party_decode(PartyRole::EncoderA, dir.path / "z.bin", dir.path / "src.ckpt", dir.path / "o.csv"),
                    ProtocolError);
    CHECK_THROWS_AS(party_decode(PartyRole::DecoderB, dir.path / "z.bin", dir.path / "cos.ckpt", dir.path / "o.csv"),
                    ProtocolError);

    // Rewriting one hex digit of the schedule hash in the header.
    auto bytes = io::read_bytes(dir.path / "z.bin");
    std::string text(bytes.begin(), bytes.end());
    const auto pos = text.find(s.hash());
    REQUIRE(pos != std::string::npos);
    bytes[pos] = bytes[pos] == 'a' ? 'b' : 'a';
    io::write_bytes(dir.path / "tampered.bin", bytes);
    CHECK_THROWS_AS(party_decode(PartyRole::DecoderB, dir.path / "tampered.bin", dir.path / "src.ckpt",
                                 dir.path / "o.csv"),
                    ProtocolError);
    CHECK(!std::filesystem::exists(dir.path / "o.csv"));
}

TEST_CASE("image translation with zero predictors is the identity") {
    const NoiseSchedule s = make_schedule(100);
    const DomainPair pair{make_stub_model(s, {8, 8}, Eigen::VectorXd::Zero(64), "a"),
                          make_stub_model(s, {8, 8}, Eigen::VectorXd::Zero(64), "b")};
    Rng rng(4);
    GrayPatch img(20, 28, 0.0);
    for (double& v : img.pixels) v = rng.uniform();
    const GrayPatch out = translate_image(img, pair, 4, 4, 10);
    REQUIRE(out.height == 20);
    REQUIRE(out.width == 28);
    double worst = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(out.pixels[i] - img.pixels[i]));
    // Latents pass through float32.
    CHECK(worst <= 1e-6);

    const DomainPair flat{make_stub_model(s, {64}, Eigen::VectorXd::Zero(64)),
                          make_stub_model(s, {64}, Eigen::VectorXd::Zero(64))};
    CHECK_THROWS_AS(translate_image(img, flat, 4, 4, 10), ConfigError);
}
