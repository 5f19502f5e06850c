#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "decdm/checkpoint.hpp"
#include "decdm/ddim.hpp"
#include "decdm/error.hpp"
#include "decdm/hashing.hpp"
#include "decdm/image.hpp"
#include "decdm/io.hpp"
#include "decdm/metrics.hpp"
#include "decdm/parallel.hpp"
#include "decdm/patches.hpp"
#include "decdm/samples.hpp"
#include "decdm/synth_data.hpp"
#include "decdm/translate.hpp"
#include "plot.hpp"

namespace decdm::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kManifestFormat = 1;

fs::path output_path(const std::string& p) {
    fs::path path(p);
    if (path.is_relative())
        if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') return fs::path(dir) / path;
    return path;
}

bool is_image_path(const fs::path& p) { return fs::is_directory(p) || p.extension() == ".pgm"; }

std::vector<fs::path> pgm_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no .pgm images in " + dir.string());
    return files;
}

std::vector<fs::path> image_inputs(const fs::path& p) {
    if (fs::is_directory(p)) return pgm_files(p);
    return {p};
}

json content_hashes(const fs::path& p) {
    if (fs::is_directory(p)) {
        json files = json::object();
        std::vector<fs::path> entries;
        for (const auto& e : fs::recursive_directory_iterator(p))
            if (e.is_regular_file()) entries.push_back(e.path());
        std::sort(entries.begin(), entries.end());
        for (const auto& e : entries) files[fs::relative(e, p).generic_string()] = git_blob_hex(io::read_bytes(e));
        return files;
    }
    if (!fs::exists(p)) return nullptr;
    return git_blob_hex(io::read_bytes(p));
}

/// Every option of the command with the value it ran with (given or default).
json option_values(const CLI::App& app) {
    json cfg = json::object();
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "help" || name == "config") continue;
        const auto& given = opt->results();
        if (!given.empty()) {
            cfg[name] = given.size() == 1 ? json(given.front()) : json(given);
        } else {
            cfg[name] = opt->get_default_str();
        }
    }
    return cfg;
}

/// Records what a command read and wrote.
struct Run {
    std::string command;
    const CLI::App* app = nullptr;
    std::vector<fs::path> inputs;
    std::vector<fs::path> outputs;
    fs::path manifest;

    void write_manifest(const json& extra = json::object()) const {
        json m;
        m["tool"] = "decdm";
        m["format"] = kManifestFormat;
        m["command"] = command;
        json cfg = option_values(*app);
        if (app->get_parent() != nullptr && app->get_parent()->get_parent() != nullptr)
            cfg.update(option_values(*app->get_parent()));
        m["config"] = cfg;
        m["threads"] = max_threads();
        json in = json::object(), out = json::object();
        for (const auto& p : inputs) in[p.generic_string()] = content_hashes(p);
        for (const auto& p : outputs) out[p.generic_string()] = content_hashes(p);
        m["inputs"] = in;
        m["outputs"] = out;
        if (!extra.empty()) m["results"] = extra;
        io::write_text(manifest, m.dump(2) + "\n");
    }
};

fs::path file_manifest(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

// ---- gen-data ----

struct GenDataOptions {
    std::string kind;
    long n = 4096;
    std::uint64_t seed = 0;
    std::string output;
    int count = 500;
    int size = 64;
    double density = 0.1;
    std::string noise = "gaussian:5,speckle:5";
};

DegradeConfig parse_noise(const std::string& spec) {
    DegradeConfig cfg;
    cfg.gaussian_sigma = 0.0;
    cfg.speckle_sigma = 0.0;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("noise component '" + item + "' must be kind:sigma");
        const std::string kind = item.substr(0, colon);
        double sigma = 0.0;
        try {
            std::size_t used = 0;
            sigma = std::stod(item.substr(colon + 1), &used);
            if (used != item.size() - colon - 1) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad noise level in '" + item + "'");
        }
        if (kind == "gaussian") {
            cfg.gaussian_sigma = sigma;
        } else if (kind == "speckle") {
            cfg.speckle_sigma = sigma;
        } else {
            throw ConfigError("unknown noise kind '" + kind + "' (expected gaussian or speckle)");
        }
    }
    return cfg;
}

void cmd_gen_data(const GenDataOptions& o, Run& run) {
    const fs::path out = output_path(o.output);
    if (o.kind == "doc") {
        if (o.count < 0) throw ConfigError("--count must be non-negative");
        const DegradeConfig noise = parse_noise(o.noise);
        Rng rng(o.seed);
        char name[32];
        for (int i = 0; i < o.count; ++i) {
            const std::uint64_t render_seed = rng.next_seed();
            DegradeConfig d = noise;
            d.seed = rng.next_seed();
            const GrayPatch clean = render_strokes(render_seed, o.size, o.size, o.density);
            std::snprintf(name, sizeof name, "%05d.pgm", i);
            write_pgm(out / "clean" / name, clean);
            write_pgm(out / "noisy" / name, degrade(clean, d));
        }
        if (o.count == 0) {
            fs::create_directories(out / "clean");
            fs::create_directories(out / "noisy");
        }
        run.outputs = {out};
        run.manifest = out / "manifest.json";
        std::printf("wrote %d clean/noisy pairs to %s\n", o.count, out.string().c_str());
        return;
    }
    const PointSet ps = make_dataset(parse_domain(o.kind), o.n, o.seed);
    write_point_csv(out, ps);
    run.outputs = {out};
    run.manifest = file_manifest(out);
    std::printf("wrote %ld %s points to %s\n", o.n, o.kind.c_str(), out.string().c_str());
}

// ---- train ----

struct TrainOptions {
    std::string data;
    std::string output;
    std::string tag;
    std::string loss_csv;
    long steps = 20000;
    int batch = 1024;
    double lr = 2e-3;
    double final_lr_fraction = 0.01;
    double clip = 1.0;
    std::uint64_t seed = 0;
    long log_every = 100;
    std::vector<int> hidden{128, 128, 128};
    int time_dim = 64;
    int horizon = 1000;
    std::string schedule = "linear-beta";
    int window = 16;
    int stride = 8;
};

DomainData load_domain(const fs::path& path, const std::string& tag, int window, int stride) {
    if (is_image_path(path)) {
        std::vector<GrayPatch> patches;
        for (const auto& file : image_inputs(path)) {
            const PatchGrid g = slide_window(read_pgm(file), window, window, stride, stride);
            patches.insert(patches.end(), g.patches.begin(), g.patches.end());
        }
        return {patches_to_samples(patches), tag, {window, window}};
    }
    const SampleTable t = read_sample_csv(path);
    return {t.values, tag, {static_cast<int>(t.values.rows())}};
}

void cmd_train(const TrainOptions& o, Run& run) {
    const fs::path data = o.data, out = output_path(o.output);
    const std::string tag = o.tag.empty() ? data.stem().string() : o.tag;
    const DomainData domain = load_domain(data, tag, o.window, o.stride);

    MlpArch arch;
    arch.data_dim = static_cast<int>(domain.samples.rows());
    arch.hidden = o.hidden;
    arch.time_dim = o.time_dim;
    TrainConfig cfg;
    cfg.steps = o.steps;
    cfg.batch_size = o.batch;
    cfg.learning_rate = o.lr;
    cfg.final_lr_fraction = o.final_lr_fraction;
    cfg.clip_norm = o.clip;
    cfg.seed = o.seed;
    cfg.log_every = o.log_every;

    std::printf("training '%s': %ld samples of dimension %ld, %ld steps\n", tag.c_str(),
                static_cast<long>(domain.samples.cols()), static_cast<long>(domain.samples.rows()), o.steps);
    const TrainResult result =
        train(domain, arch, cfg, make_schedule(o.horizon, parse_schedule_kind(o.schedule)), [](const LossPoint& p) {
            std::printf("  step %ld loss %.5f\n", p.step, p.loss);
            std::fflush(stdout);
        });
    save_checkpoint(out, result.model);

    const fs::path loss = o.loss_csv.empty() ? fs::path(out.string() + ".loss.csv") : output_path(o.loss_csv);
    std::string csv = "step,loss\n";
    char buf[64];
    for (const auto& p : result.curve) {
        std::snprintf(buf, sizeof buf, "%ld,%.9g\n", p.step, p.loss);
        csv += buf;
    }
    io::write_text(loss, csv);

    run.inputs = {data};
    run.outputs = {out, loss};
    run.manifest = file_manifest(out);
}

// ---- translate ----

struct TranslateOptions {
    std::string source;
    std::string target;
    std::string input;
    std::string output;
    int steps = kDefaultDdimSteps;
    int stride = 0;
    std::string cycle;
};

DomainPair load_pair(const fs::path& source, const fs::path& target) {
    DomainPair pair{load_checkpoint(source), load_checkpoint(target)};
    pair.validate();
    return pair;
}

void cmd_translate(const TranslateOptions& o, Run& run) {
    const fs::path in = o.input, out = output_path(o.output);
    const DomainPair pair = load_pair(o.source, o.target);
    run.inputs = {o.source, o.target, in};
    run.outputs = {out};
    run.manifest = fs::is_directory(in) ? out / "manifest.json" : file_manifest(out);

    Eigen::MatrixXd fed;  // the samples that went through the models, for --cycle
    if (is_image_path(in)) {
        const auto& shape = pair.source.data_shape;
        if (shape.size() != 2) throw ConfigError("image input needs patch-domain checkpoints");
        const int stride = o.stride > 0 ? o.stride : std::max(1, shape[0] / 2);
        std::vector<GrayPatch> all_patches;
        for (const auto& file : image_inputs(in)) {
            const GrayPatch img = read_pgm(file);
            const GrayPatch result = translate_image(img, pair, stride, stride, o.steps);
            write_pgm(fs::is_directory(in) ? out / file.filename() : out, result);
            if (!o.cycle.empty()) {
                const PatchGrid g = slide_window(img, shape[0], shape[1], stride, stride);
                all_patches.insert(all_patches.end(), g.patches.begin(), g.patches.end());
            }
        }
        if (!o.cycle.empty()) fed = patches_to_samples(all_patches);
    } else {
        const SampleTable table = read_sample_csv(in);
        write_sample_csv(out, SampleTable{translate(table.values, pair, o.steps), table.labels});
        fed = table.values;
    }

    if (!o.cycle.empty()) {
        const fs::path report_path = output_path(o.cycle);
        const CycleReport report = cycle_check(fed, pair, o.steps);
        write_cycle_csv(report_path, report);
        run.outputs.push_back(report_path);
        std::printf("cycle %s->%s: mean latent L2 %.6f, mean source L2 %.6f\n", report.source_name.c_str(),
                    report.target_name.c_str(), report.mean_latent_l2, report.mean_source_l2);
    }
}

// ---- cycle ----

struct CycleOptions {
    std::string source;
    std::string target;
    std::string data;
    std::string output;
    int steps = kDefaultDdimSteps;
    bool stub_eps0 = false;
    int horizon = 1000;
    double extent = 3.0;
};

json cmd_cycle(const CycleOptions& o, Run& run) {
    const fs::path data = o.data, out = output_path(o.output);
    const SampleTable table = read_sample_csv(data);
    DomainPair pair;
    if (o.stub_eps0) {
        const int dim = static_cast<int>(table.values.rows());
        const NoiseSchedule s = make_schedule(o.horizon);
        pair = {make_stub_model(s, {dim}, Eigen::VectorXd::Zero(dim), "stub-source"),
                make_stub_model(s, {dim}, Eigen::VectorXd::Zero(dim), "stub-target")};
        run.inputs = {data};
    } else {
        if (o.source.empty() || o.target.empty())
            throw ConfigError("cycle needs --source and --target checkpoints (or --stub-eps0)");
        pair = load_pair(o.source, o.target);
        run.inputs = {o.source, o.target, data};
    }

    CycleTrace trace;
    const CycleReport report = cycle_check(table.values, pair, o.steps, &trace);
    write_cycle_csv(out / "cycle.csv", report);
    run.outputs = {out / "cycle.csv"};
    if (table.values.rows() == 2) {
        const std::pair<const char*, const Eigen::MatrixXd*> panels[] = {{"source.ppm", &table.values},
                                                                         {"latent.ppm", &trace.latent},
                                                                         {"target.ppm", &trace.translated},
                                                                         {"reconstructed.ppm", &trace.reconstructed}};
        for (const auto& [name, pts] : panels) {
            write_scatter_ppm(out / name, *pts, table.labels, o.extent);
            run.outputs.push_back(out / name);
        }
    } else {
        std::printf("samples are %ld-dimensional; skipping scatter plots\n", static_cast<long>(table.values.rows()));
    }
    run.manifest = out / "manifest.json";
    std::printf("cycle %s->%s (%d steps): mean latent L2 %.6f, mean source L2 %.6f\n", report.source_name.c_str(),
                report.target_name.c_str(), report.n_steps, report.mean_latent_l2, report.mean_source_l2);
    return {{"mean_latent_l2", report.mean_latent_l2}, {"mean_source_l2", report.mean_source_l2}};
}

// ---- party ----

struct PartyOptions {
    std::string role;
    std::string data;
    std::string latent;
    std::string checkpoint;
    std::string output;
    std::string audit_log;
    int steps = kDefaultDdimSteps;
};

PartyRole parse_role(const std::string& s) {
    std::string r = s;
    std::transform(r.begin(), r.end(), r.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (r == "a" || r == "encoder") return PartyRole::EncoderA;
    if (r == "b" || r == "decoder") return PartyRole::DecoderB;
    throw ConfigError("unknown party role '" + s + "' (expected A or B)");
}

void write_audit(const fs::path& path, PartyRole role, const std::vector<io::AccessRecord>& records) {
    json j;
    j["role"] = std::string(party_role_name(role));
    j["accesses"] = json::array();
    for (const auto& r : records)
        j["accesses"].push_back(
            {{"kind", r.kind == io::AccessRecord::Kind::read ? "read" : "write"}, {"path", r.path.generic_string()}});
    io::write_text(path, j.dump(2) + "\n");
}

void cmd_party_encode(const PartyOptions& o, Run& run) {
    const PartyRole role = parse_role(o.role);
    const fs::path out = output_path(o.output);
    const auto records = party_encode(role, o.data, o.checkpoint, out, o.steps);
    const fs::path audit = o.audit_log.empty() ? fs::path(out.string() + ".audit.json") : output_path(o.audit_log);
    write_audit(audit, role, records);
    run.inputs = {o.data, o.checkpoint};
    run.outputs = {out, audit};
    run.manifest = file_manifest(out);
}

void cmd_party_decode(const PartyOptions& o, Run& run) {
    const PartyRole role = parse_role(o.role);
    const fs::path out = output_path(o.output);
    const auto records = party_decode(role, o.latent, o.checkpoint, out);
    const fs::path audit = o.audit_log.empty() ? fs::path(out.string() + ".audit.json") : output_path(o.audit_log);
    write_audit(audit, role, records);
    run.inputs = {o.latent, o.checkpoint};
    run.outputs = {out, audit};
    run.manifest = file_manifest(out);
}

// ---- patches ----

struct PatchOptions {
    std::string image;
    std::string dir;
    std::string output;
    int window = 128;
    int stride = 0;
};

void cmd_patches_split(const PatchOptions& o, Run& run) {
    const fs::path out = output_path(o.output);
    const GrayPatch img = read_pgm(o.image);
    const PatchGrid g = o.stride > 0 ? slide_window(img, o.window, o.window, o.stride, o.stride)
                                     : sub_window(img, o.window, o.window);
    write_patch_manifest(out, g);
    run.inputs = {o.image};
    run.outputs = {out};
    run.manifest = out / "manifest.json";
    std::printf("wrote %zu patches to %s\n", g.size(), out.string().c_str());
}

void cmd_patches_stitch(const PatchOptions& o, Run& run) {
    const fs::path out = output_path(o.output);
    write_pgm(out, stitch(read_patch_manifest(o.dir)));
    run.inputs = {o.dir};
    run.outputs = {out};
    run.manifest = file_manifest(out);
}

// ---- metrics ----

struct MetricsOptions {
    std::string ref;
    std::string test;
    std::string output;
};

void cmd_metrics(const MetricsOptions& o, Run& run) {
    const fs::path ref = o.ref, test = o.test, out = output_path(o.output);
    std::vector<std::pair<fs::path, fs::path>> pairs;
    if (fs::is_directory(ref)) {
        if (!fs::is_directory(test)) throw ConfigError("--ref is a directory, so --test must be one too");
        for (const auto& r : pgm_files(ref)) {
            const fs::path t = test / r.filename();
            if (!fs::exists(t)) throw ConfigError("no counterpart for " + r.filename().string() + " in " + test.string());
            pairs.emplace_back(r, t);
        }
    } else {
        pairs.emplace_back(ref, test);
    }
    std::vector<MetricReport> rows;
    for (const auto& [r, t] : pairs) {
        rows.push_back(evaluate_pair(r.filename().string(), read_pgm(r), read_pgm(t)));
        std::printf("%s psnr %.4f dB ssim %.4f\n", rows.back().name.c_str(), rows.back().psnr_db, rows.back().ssim);
    }
    write_metrics_csv(out, rows);
    run.inputs = {ref, test};
    run.outputs = {out};
    run.manifest = file_manifest(out);
}

std::vector<char*> as_argv(std::vector<std::string>& args) {
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return argv;
}

}  // namespace

int run(const std::vector<std::string>& args_in) {
    CLI::App app{"Unpaired translation between domains through two independently trained diffusion models", "decdm"};
    app.set_config("--config", "", "TOML/INI file with option values; command-line flags take precedence");
    app.allow_config_extras(false);
    app.require_subcommand(1);
    unsigned threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = one per logical core)")->capture_default_str();

    GenDataOptions gen;
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a 2D dataset or clean/noisy stroke images");
    gen_cmd->add_option("--kind", gen.kind, "tm, cb, cr, cs, pr, ps or doc")->required();
    gen_cmd->add_option("--n", gen.n, "Number of 2D points")->capture_default_str()->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("-o,--output", gen.output, "CSV file (2D) or directory (doc)")->required();
    gen_cmd->add_option("--count", gen.count, "Image pairs for --kind doc")->capture_default_str();
    gen_cmd->add_option("--size", gen.size, "Image side length for --kind doc")->capture_default_str();
    gen_cmd->add_option("--density", gen.density, "Stroke density for --kind doc")->capture_default_str();
    gen_cmd->add_option("--noise", gen.noise, "Degradation, e.g. gaussian:5,speckle:5 (0-255 scale)")
        ->capture_default_str();

    TrainOptions tr;
    auto* train_cmd = app.add_subcommand("train", "Train one domain's diffusion model");
    train_cmd->add_option("--data", tr.data, "Sample CSV, a .pgm image or a directory of them")->required();
    train_cmd->add_option("-o,--output", tr.output, "Checkpoint to write")->required();
    train_cmd->add_option("--tag", tr.tag, "Domain name stored in the checkpoint (default: data file stem)");
    train_cmd->add_option("--loss-csv", tr.loss_csv, "Loss curve CSV (default: <output>.loss.csv)");
    train_cmd->add_option("--steps", tr.steps, "Optimizer steps")->capture_default_str();
    train_cmd->add_option("--batch", tr.batch, "Minibatch size")->capture_default_str();
    train_cmd->add_option("--lr", tr.lr, "Initial learning rate")->capture_default_str();
    train_cmd->add_option("--final-lr-fraction", tr.final_lr_fraction, "Final learning rate / initial (cosine decay)")
        ->capture_default_str();
    train_cmd->add_option("--clip", tr.clip, "Global gradient-norm clip")->capture_default_str();
    train_cmd->add_option("--seed", tr.seed, "Random seed")->capture_default_str();
    train_cmd->add_option("--log-every", tr.log_every, "Loss logging interval")->capture_default_str();
    train_cmd->add_option("--hidden", tr.hidden, "Hidden layer widths")->delimiter(',')->capture_default_str();
    train_cmd->add_option("--time-dim", tr.time_dim, "Time embedding size")->capture_default_str();
    train_cmd->add_option("--T", tr.horizon, "Diffusion horizon")->capture_default_str();
    train_cmd->add_option("--schedule", tr.schedule, "linear-beta or cosine")->capture_default_str();
    train_cmd->add_option("--window", tr.window, "Patch size for image data")->capture_default_str();
    train_cmd->add_option("--stride", tr.stride, "Slide-window stride for image data")->capture_default_str();

    TranslateOptions tl;
    auto* translate_cmd = app.add_subcommand("translate", "Translate samples or images from source to target domain");
    translate_cmd->add_option("--source", tl.source, "Source-domain checkpoint")->required();
    translate_cmd->add_option("--target", tl.target, "Target-domain checkpoint")->required();
    translate_cmd->add_option("--input", tl.input, "Sample CSV, a .pgm image or a directory of them")->required();
    translate_cmd->add_option("-o,--output", tl.output, "Output CSV, image or directory")->required();
    translate_cmd->add_option("--steps", tl.steps, "DDIM steps each way")->capture_default_str();
    translate_cmd->add_option("--stride", tl.stride, "Slide-window stride for images (0 = half the patch)")
        ->capture_default_str();
    translate_cmd->add_option("--cycle", tl.cycle, "Also write a cycle-consistency report CSV here");

    CycleOptions cy;
    auto* cycle_cmd = app.add_subcommand("cycle", "Cycle-consistency check with scatter plots");
    cycle_cmd->add_option("--source", cy.source, "Source-domain checkpoint");
    cycle_cmd->add_option("--target", cy.target, "Target-domain checkpoint");
    cycle_cmd->add_option("--data", cy.data, "Source sample CSV (a label column colors the plots)")->required();
    cycle_cmd->add_option("-o,--output", cy.output, "Output directory")->required();
    cycle_cmd->add_option("--steps", cy.steps, "DDIM steps each way")->capture_default_str();
    cycle_cmd->add_flag("--stub-eps0", cy.stub_eps0, "Use zero noise predictors instead of checkpoints");
    cycle_cmd->add_option("--T", cy.horizon, "Horizon of the stub models")->capture_default_str();
    cycle_cmd->add_option("--extent", cy.extent, "Plot half-width")->capture_default_str();

    PartyOptions pe, pd;
    auto* party_cmd = app.add_subcommand("party", "Two-party protocol: only latent files cross between parties");
    party_cmd->require_subcommand(1);
    auto* encode_cmd = party_cmd->add_subcommand("encode", "Party A: source samples to latent file");
    encode_cmd->add_option("--role", pe.role, "Acting party (A or B)")->required();
    encode_cmd->add_option("--data", pe.data, "Source sample CSV")->required();
    encode_cmd->add_option("--checkpoint", pe.checkpoint, "Source-domain checkpoint")->required();
    encode_cmd->add_option("-o,--output", pe.output, "Latent file to write")->required();
    encode_cmd->add_option("--steps", pe.steps, "DDIM steps")->capture_default_str();
    encode_cmd->add_option("--audit-log", pe.audit_log, "File access log (default: <output>.audit.json)");
    auto* decode_cmd = party_cmd->add_subcommand("decode", "Party B: latent file to translated samples");
    decode_cmd->add_option("--role", pd.role, "Acting party (A or B)")->required();
    decode_cmd->add_option("--latent", pd.latent, "Latent file from party A")->required();
    decode_cmd->add_option("--checkpoint", pd.checkpoint, "Target-domain checkpoint")->required();
    decode_cmd->add_option("-o,--output", pd.output, "Translated sample CSV")->required();
    decode_cmd->add_option("--audit-log", pd.audit_log, "File access log (default: <output>.audit.json)");

    PatchOptions ps, pst;
    auto* patches_cmd = app.add_subcommand("patches", "Split images into patches or stitch them back");
    patches_cmd->require_subcommand(1);
    auto* split_cmd = patches_cmd->add_subcommand("split", "Image to patch directory");
    split_cmd->add_option("--image", ps.image, "Input .pgm")->required();
    split_cmd->add_option("--window", ps.window, "Patch size")->capture_default_str();
    split_cmd->add_option("--stride", ps.stride, "Slide-window stride (0 = non-overlapping sub-windows)")
        ->capture_default_str();
    split_cmd->add_option("-o,--output", ps.output, "Patch directory")->required();
    auto* stitch_cmd = patches_cmd->add_subcommand("stitch", "Patch directory to image");
    stitch_cmd->add_option("--dir", pst.dir, "Patch directory written by split")->required();
    stitch_cmd->add_option("-o,--output", pst.output, "Output .pgm")->required();

    MetricsOptions mo;
    auto* metrics_cmd = app.add_subcommand("metrics", "PSNR and SSIM between reference and test images");
    metrics_cmd->add_option("--ref", mo.ref, "Reference .pgm or directory")->required();
    metrics_cmd->add_option("--test", mo.test, "Test .pgm or directory with matching names")->required();
    metrics_cmd->add_option("-o,--output", mo.output, "Metrics CSV")->required();

    std::vector<std::string> args = args_in;
    if (args.empty()) args.emplace_back("decdm");
    auto argv = as_argv(args);
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::config);
    }

    try {
        set_max_threads(threads);
        Run run;
        json results = json::object();
        if (gen_cmd->parsed()) {
            run.command = "gen-data";
            run.app = gen_cmd;
            cmd_gen_data(gen, run);
        } else if (train_cmd->parsed()) {
            run.command = "train";
            run.app = train_cmd;
            cmd_train(tr, run);
        } else if (translate_cmd->parsed()) {
            run.command = "translate";
            run.app = translate_cmd;
            cmd_translate(tl, run);
        } else if (cycle_cmd->parsed()) {
            run.command = "cycle";
            run.app = cycle_cmd;
            results = cmd_cycle(cy, run);
        } else if (encode_cmd->parsed()) {
            run.command = "party encode";
            run.app = encode_cmd;
            cmd_party_encode(pe, run);
        } else if (decode_cmd->parsed()) {
            run.command = "party decode";
            run.app = decode_cmd;
            cmd_party_decode(pd, run);
        } else if (split_cmd->parsed()) {
            run.command = "patches split";
            run.app = split_cmd;
            cmd_patches_split(ps, run);
        } else if (stitch_cmd->parsed()) {
            run.command = "patches stitch";
            run.app = stitch_cmd;
            cmd_patches_stitch(pst, run);
        } else if (metrics_cmd->parsed()) {
            run.command = "metrics";
            run.app = metrics_cmd;
            cmd_metrics(mo, run);
        }
        run.write_manifest(results);
        return 0;
    } catch (const Error& e) {
        std::fprintf(stderr, "decdm: error: %s\n", e.what());
        return static_cast<int>(e.code());
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "decdm: error: %s\n", e.what());
        return static_cast<int>(ExitCode::config);
    }
}

}  // namespace decdm::cli
