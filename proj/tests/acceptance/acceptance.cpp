// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Training-heavy criteria (1, 3, 8, 9)
// take tens of minutes on one core.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <set>
#include <string>

#include "json.hpp"

#include "cli.hpp"
#include "decdm/checkpoint.hpp"
#include "decdm/ddim.hpp"
#include "decdm/io.hpp"
#include "decdm/metrics.hpp"
#include "decdm/patches.hpp"
#include "decdm/samples.hpp"
#include "decdm/synth_data.hpp"
#include "decdm/translate.hpp"

using namespace decdm;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kCycleMax = 0.05;             // 1: mean latent and source L2
constexpr double kStubRelMax = 1e-12;          // 2
constexpr double kRoundTripMax = 1e-3;         // 3: per-coordinate L2
constexpr double kMonotoneFraction = 0.9;      // 3
constexpr double kMeanSigmas = 4.0;            // 4: mean within 4/sqrt(N)
constexpr double kVarianceRel = 0.10;          // 4
constexpr double kGradRelMax = 1e-4;           // 5
constexpr double kSlideStitchMax = 1e-12;      // 6
constexpr double kPsnrOracle = 48.13;          // 7
constexpr double kPsnrTol = 0.01;              // 7
constexpr double kSsimSelfTol = 1e-12;         // 7
constexpr double kPsnrGainMin = 2.0;           // 8: dB
constexpr double kSsimGainMin = 0.05;          // 8

// 2D experiment setup.
constexpr int kPoints = 4096;
constexpr int kHorizon = 1000;
constexpr int kSteps = kDefaultDdimSteps;

TrainConfig planar_training(std::uint64_t seed) {
    TrainConfig c;
    c.steps = 20000;
    c.batch_size = 1024;
    c.learning_rate = 2e-3;
    c.final_lr_fraction = 0.01;
    c.seed = seed;
    c.log_every = 5000;
    return c;
}

// Patch experiment setup.
constexpr int kPatch = 16;
constexpr int kImage = 64;
constexpr int kPatchStride = 8;
constexpr int kTrainImages = 500;  // 49 patches each: 24500 per domain
constexpr int kHeldOut = 100;

TrainConfig patch_training(std::uint64_t seed) {
    TrainConfig c;
    c.steps = 20000;
    c.batch_size = 128;
    c.learning_rate = 5e-4;
    c.final_lr_fraction = 0.05;
    c.seed = seed;
    c.log_every = 5000;
    return c;
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("criterion %d: %s | %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void progress(const std::string& what, const LossPoint& p) {
    std::fprintf(stderr, "  [%s] step %ld loss %.4f\n", what.c_str(), p.step, p.loss);
}

Eigen::MatrixXd gaussian(int dim, long n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd x(dim, n);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
    return x;
}

// ---- 1 ----

DomainPair criterion_cycle(const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    const PointSet cr = make_dataset(Domain::CR, kPoints, 1), pr = make_dataset(Domain::PR, kPoints, 2);
    const MlpArch arch;  // 3 x 128, 64-dim time embedding
    const NoiseSchedule schedule = make_schedule(kHorizon);
    const TrainResult a = train({cr.points, "cr", {2}}, arch, planar_training(11), schedule,
                                [](const LossPoint& p) { progress("cr", p); });
    const TrainResult b = train({pr.points, "pr", {2}}, arch, planar_training(12), schedule,
                                [](const LossPoint& p) { progress("pr", p); });
    const DomainPair pair{a.model, b.model};
    save_checkpoint(work / "cr.ckpt", pair.source);
    save_checkpoint(work / "pr.ckpt", pair.target);

    const Eigen::MatrixXd probe = make_dataset(Domain::CR, 1024, 101).points;
    const CycleReport fwd = cycle_check(probe, pair, kSteps);
    const CycleReport back = cycle_check(make_dataset(Domain::PR, 1024, 102).points, pair.swapped(), kSteps);
    write_cycle_csv(work / "cycle_cr_pr.csv", fwd);
    write_cycle_csv(work / "cycle_pr_cr.csv", back);
    const bool pass = fwd.mean_latent_l2 <= kCycleMax && fwd.mean_source_l2 <= kCycleMax;
    report(1, pass,
           fmt("CR->PR mean latent L2 %.4f, source L2 %.4f (limit %.2f); PR->CR latent %.4f, source %.4f; %.0f s",
               fwd.mean_latent_l2, fwd.mean_source_l2, kCycleMax, back.mean_latent_l2, back.mean_source_l2,
               seconds_since(t0)));
    return pair;
}

// ---- 2 ----

void criterion_stub() {
    const auto t0 = std::chrono::steady_clock::now();
    const NoiseSchedule s = make_schedule(kHorizon);
    const DomainPair pair{make_stub_model(s, {2}, Eigen::VectorXd::Zero(2), "a"),
                          make_stub_model(s, {2}, Eigen::VectorXd::Zero(2), "b")};
    const Eigen::MatrixXd x = make_dataset(Domain::TM, 1024, 5).points;
    CycleTrace trace;
    const CycleReport r = cycle_check(x, pair, kSteps, &trace);
    const double src_rel = r.mean_source_l2 / x.colwise().norm().mean();
    const double lat_rel = r.mean_latent_l2 / trace.latent.colwise().norm().mean();
    report(2, src_rel <= kStubRelMax && lat_rel <= kStubRelMax,
           fmt("relative source %.2e, latent %.2e (limit %.0e); %.2f s", src_rel, lat_rel, kStubRelMax,
               seconds_since(t0)));
}

// ---- 3 ----

Eigen::VectorXd round_trip_errors(const DenoiserModel& m, const Eigen::MatrixXd& x, int n_steps) {
    const Eigen::MatrixXd back = decode(m, encode(m, x, n_steps));
    return (back - x).colwise().norm().transpose() / std::sqrt(static_cast<double>(x.rows()));
}

void criterion_round_trip(const DenoiserModel& model) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::MatrixXd x = make_dataset(Domain::CR, 512, 103).points;
    const Eigen::VectorXd e50 = round_trip_errors(model, x, 50);
    const Eigen::VectorXd e100 = round_trip_errors(model, x, 100);
    const Eigen::VectorXd e200 = round_trip_errors(model, x, 200);
    long monotone = 0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) monotone += e100[j] <= e50[j] && e200[j] <= e100[j];
    const double frac = static_cast<double>(monotone) / static_cast<double>(x.cols());
    const double mean200 = e200.mean();
    report(3, mean200 <= kRoundTripMax && frac >= kMonotoneFraction,
           fmt("per-coordinate L2 at 200 steps %.2e (limit %.0e; 50: %.2e, 100: %.2e); non-increasing 50->100->200 "
               "in %.1f%% (limit %.0f%%); %.0f s",
               mean200, kRoundTripMax, e50.mean(), e100.mean(), 100.0 * frac, 100.0 * kMonotoneFraction,
               seconds_since(t0)));
}

// ---- 4 ----

void criterion_forward_stats() {
    const auto t0 = std::chrono::steady_clock::now();
    const NoiseSchedule s({1.0, 0.5, 1e-5});  // alpha_1 = 0.5
    const long n = 100000;
    const Eigen::Vector2d x0(1.3, -0.6);
    const Eigen::MatrixXd xt = forward_sample(x0.replicate(1, n), 1, gaussian(2, n, 404), s);
    const Eigen::Vector2d mean = xt.rowwise().mean();
    const Eigen::MatrixXd centered = xt.colwise() - mean;
    const Eigen::Vector2d var = centered.rowwise().squaredNorm() / static_cast<double>(n);
    const double mean_err = (mean - std::sqrt(0.5) * x0).cwiseAbs().maxCoeff();
    const double mean_tol = kMeanSigmas / std::sqrt(static_cast<double>(n));
    const double var_err = ((var.array() - 0.5).abs() / 0.5).maxCoeff();
    report(4, mean_err <= mean_tol && var_err <= kVarianceRel,
           fmt("max mean error %.2e (limit %.2e), max variance rel. error %.3f (limit %.2f); %.2f s", mean_err,
               mean_tol, var_err, kVarianceRel, seconds_since(t0)));
}

// ---- 5 ----

void criterion_gradient() {
    const MlpArch arch{2, {4, 4}, 4};
    const NoiseSchedule s = make_schedule(kHorizon);
    Rng rng(505);
    const NoisedBatch batch = draw_noised_batch(gaussian(2, 32, 506), s, rng);
    const Mlp<double> net = Mlp<double>::initialized(arch, 507);
    const auto analytic = denoise_loss(net, batch);
    const double h = 1e-6;
    double worst = 0.0;
    for (int probe = 0; probe < 20; ++probe) {
        std::vector<double> dir(arch.param_count());
        for (double& d : dir) d = rng.normal();
        auto loss_at = [&](double step) {
            std::vector<double> p = net.params();
            for (std::size_t k = 0; k < p.size(); ++k) p[k] += step * dir[k];
            return denoise_loss(Mlp<double>(arch, p), batch).loss;
        };
        const double fd = (loss_at(h) - loss_at(-h)) / (2.0 * h);
        double an = 0.0;
        for (std::size_t k = 0; k < dir.size(); ++k) an += analytic.gradient[k] * dir[k];
        worst = std::max(worst, std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-12}));
    }
    report(5, worst <= kGradRelMax && arch.param_count() <= 100,
           fmt("%zu parameters, 20 directional probes, worst relative error %.2e (limit %.0e)", arch.param_count(),
               worst, kGradRelMax));
}

// ---- 6 ----

void criterion_patches() {
    Rng rng(606);
    int sub_exact = 0;
    double slide_worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int h = static_cast<int>(rng.integer(1, 96)), w = static_cast<int>(rng.integer(1, 96));
        GrayPatch img(h, w);
        for (double& v : img.pixels) v = rng.uniform();
        const int wh = static_cast<int>(rng.integer(1, h)), ww = static_cast<int>(rng.integer(1, w));
        const int sh = static_cast<int>(rng.integer(1, wh)), sw = static_cast<int>(rng.integer(1, ww));
        sub_exact += stitch(sub_window(img, wh, ww)) == img;
        const GrayPatch back = stitch(slide_window(img, wh, ww, sh, sw));
        for (std::size_t i = 0; i < img.size(); ++i)
            slide_worst = std::max(slide_worst, std::abs(back.pixels[i] - img.pixels[i]));
    }
    const GrayPatch page(1024, 1024, 1.0);
    const std::size_t n256 = sub_window(page, 256, 256).size(), n128 = sub_window(page, 128, 128).size();
    report(6, sub_exact == 100 && slide_worst <= kSlideStitchMax && n256 == 16 && n128 == 64,
           fmt("sub-window exact in %d/100, slide-window worst error %.1e (limit %.0e); 1024/256 -> %zu, 1024/128 -> %zu",
               sub_exact, slide_worst, kSlideStitchMax, n256, n128));
}

// ---- 7 ----

void criterion_metrics() {
    const GrayPatch a(64, 64, 0.5);
    GrayPatch b = a;
    for (double& v : b.pixels) v += 1.0 / 255.0;
    Rng rng(707);
    GrayPatch x(64, 64);
    for (double& v : x.pixels) v = rng.uniform();
    const double p = psnr(a, b), self = ssim(x, x);
    report(7, std::abs(p - kPsnrOracle) <= kPsnrTol && std::abs(self - 1.0) <= kSsimSelfTol,
           fmt("psnr of a uniform 1/255 offset %.4f dB (expect %.2f +- %.2f), ssim(x, x) = %.15f", p, kPsnrOracle,
               kPsnrTol, self));
}

// ---- 8 ----

std::vector<GrayPatch> training_patches(int images, std::uint64_t seed, bool noisy) {
    Rng rng(seed);
    std::vector<GrayPatch> out;
    for (int i = 0; i < images; ++i) {
        GrayPatch img = render_strokes(rng.next_seed(), kImage, kImage, 0.1);
        const std::uint64_t noise_seed = rng.next_seed();
        if (noisy) img = degrade(img, {5.0, 5.0, noise_seed});
        const PatchGrid g = slide_window(img, kPatch, kPatch, kPatchStride, kPatchStride);
        out.insert(out.end(), g.patches.begin(), g.patches.end());
    }
    return out;
}

void criterion_denoising(const fs::path& work) {
    const auto t0 = std::chrono::steady_clock::now();
    // Unpaired: the two domains come from disjoint image sets.
    const Eigen::MatrixXd noisy = patches_to_samples(training_patches(kTrainImages, 801, true));
    const Eigen::MatrixXd clean = patches_to_samples(training_patches(kTrainImages, 802, false));
    const MlpArch arch{kPatch * kPatch, {512, 512, 512}, 64};
    const NoiseSchedule schedule = make_schedule(kHorizon);
    const TrainResult src = train({noisy, "noisy-strokes", {kPatch, kPatch}}, arch, patch_training(21), schedule,
                                  [](const LossPoint& p) { progress("noisy", p); });
    const TrainResult tgt = train({clean, "clean-strokes", {kPatch, kPatch}}, arch, patch_training(22), schedule,
                                  [](const LossPoint& p) { progress("clean", p); });
    const DomainPair pair{src.model, tgt.model};
    save_checkpoint(work / "noisy.ckpt", pair.source);
    save_checkpoint(work / "clean.ckpt", pair.target);

    // Held-out pairs: one patch per fresh image, cut at a random origin.
    Rng rng(803);
    std::vector<GrayPatch> ref, raw;
    for (int i = 0; i < kHeldOut; ++i) {
        const GrayPatch img = render_strokes(rng.next_seed(), kImage, kImage, 0.1);
        const GrayPatch deg = degrade(img, {5.0, 5.0, rng.next_seed()});
        const int r0 = static_cast<int>(rng.integer(0, kImage - kPatch));
        const int c0 = static_cast<int>(rng.integer(0, kImage - kPatch));
        GrayPatch a(kPatch, kPatch), b(kPatch, kPatch);
        for (int r = 0; r < kPatch; ++r)
            for (int c = 0; c < kPatch; ++c) {
                a.at(r, c) = img.at(r0 + r, c0 + c);
                b.at(r, c) = deg.at(r0 + r, c0 + c);
            }
        ref.push_back(a);
        raw.push_back(b);
    }
    const auto out = samples_to_patches(translate(patches_to_samples(raw), pair, kSteps), kPatch, kPatch);

    double psnr_raw = 0, psnr_out = 0, ssim_raw = 0, ssim_out = 0;
    std::vector<MetricReport> rows;
    for (int i = 0; i < kHeldOut; ++i) {
        const MetricReport before = evaluate_pair(fmt("raw_%03d", i), ref[i], raw[i]);
        const MetricReport after = evaluate_pair(fmt("translated_%03d", i), ref[i], out[i]);
        psnr_raw += before.psnr_db;
        psnr_out += after.psnr_db;
        ssim_raw += before.ssim;
        ssim_out += after.ssim;
        rows.push_back(before);
        rows.push_back(after);
    }
    write_metrics_csv(work / "denoising_metrics.csv", rows);
    psnr_raw /= kHeldOut;
    psnr_out /= kHeldOut;
    ssim_raw /= kHeldOut;
    ssim_out /= kHeldOut;
    const double dp = psnr_out - psnr_raw, ds = ssim_out - ssim_raw;
    report(8, std::isfinite(dp) && dp >= kPsnrGainMin && ds >= kSsimGainMin,
           fmt("mean PSNR %.2f -> %.2f dB (gain %+.2f, need %+.1f), mean SSIM %.4f -> %.4f (gain %+.4f, need %+.2f); "
               "%ld training patches per domain; %.0f s",
               psnr_raw, psnr_out, dp, kPsnrGainMin, ssim_raw, ssim_out, ds, kSsimGainMin,
               static_cast<long>(noisy.cols()), seconds_since(t0)));
}

// ---- 9 ----

int cli_run(std::vector<std::string> args) {
    args.insert(args.begin(), "decdm");
    return cli::run(args);
}

std::set<std::string> audited_reads(const fs::path& audit_file) {
    std::set<std::string> reads;
    const auto j = nlohmann::json::parse(io::read_text(audit_file));
    for (const auto& a : j.at("accesses"))
        if (a.at("kind") == "read") reads.insert(a.at("path").get<std::string>());
    return reads;
}

bool all_under(const std::set<std::string>& paths, const std::vector<fs::path>& roots) {
    for (const auto& p : paths) {
        bool inside = false;
        for (const auto& r : roots) inside |= p.rfind(r.string() + "/", 0) == 0;
        if (!inside) return false;
    }
    return true;
}

void criterion_privacy(const fs::path& work, const DomainPair& pair) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path a = work / "party_a", b = work / "party_b", wire = work / "wire";
    fs::remove_all(a);
    fs::remove_all(b);
    fs::remove_all(wire);
    const Eigen::MatrixXd x = make_dataset(Domain::CR, 256, 909).points;
    write_sample_csv(a / "source.csv", SampleTable{x, {}});
    save_checkpoint(a / "source.ckpt", pair.source);
    save_checkpoint(b / "target.ckpt", pair.target);

    const int rc_a = cli_run({"party", "encode", "--role", "A", "--data", (a / "source.csv").string(), "--checkpoint",
                              (a / "source.ckpt").string(), "-o", (wire / "latent.bin").string(), "--audit-log",
                              (a / "audit.json").string()});
    const int rc_b = cli_run({"party", "decode", "--role", "B", "--latent", (wire / "latent.bin").string(),
                              "--checkpoint", (b / "target.ckpt").string(), "-o", (b / "translated.csv").string(),
                              "--audit-log", (b / "audit.json").string()});
    bool identical = false;
    if (rc_a == 0 && rc_b == 0) {
        const Eigen::MatrixXd in_process = translate(read_sample_csv(a / "source.csv").values, pair, kSteps);
        identical = read_sample_csv(b / "translated.csv").values == in_process;
    }

    bool disjoint = false;
    if (rc_a == 0 && rc_b == 0) {
        const auto ra = audited_reads(a / "audit.json"), rb = audited_reads(b / "audit.json");
        bool overlap = false;
        for (const auto& p : ra) overlap |= rb.count(p) > 0;
        disjoint = !overlap && all_under(ra, {a}) && all_under(rb, {b, wire}) && !ra.empty() && !rb.empty();
    }

    // Point the header at a different schedule.
    auto bytes = io::read_bytes(wire / "latent.bin");
    const std::string hash = pair.source.schedule.hash();
    const auto pos = std::string(bytes.begin(), bytes.end()).find(hash);
    int rc_tamper = -1;
    if (pos != std::string::npos) {
        bytes[pos] = bytes[pos] == '0' ? '1' : '0';
        io::write_bytes(wire / "tampered.bin", bytes);
        rc_tamper = cli_run({"party", "decode", "--role", "B", "--latent", (wire / "tampered.bin").string(),
                             "--checkpoint", (b / "target.ckpt").string(), "-o", (b / "tampered.csv").string()});
    }
    report(9, identical && disjoint && rc_tamper == 4,
           fmt("file pipeline %s in-process translation; audited reads %s; tampered header exit code %d (expect 4); "
               "%.0f s",
               identical ? "equals" : "DIFFERS FROM", disjoint ? "disjoint per role" : "NOT disjoint", rc_tamper,
               seconds_since(t0)));
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "decdm-acceptance";
    fs::create_directories(work);
    std::fprintf(stderr, "acceptance artifacts in %s\n", work.string().c_str());

    const DomainPair planar = criterion_cycle(work);
    criterion_stub();
    criterion_round_trip(planar.source);
    criterion_forward_stats();
    criterion_gradient();
    criterion_patches();
    criterion_metrics();
    criterion_denoising(work);
    criterion_privacy(work, planar);

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
