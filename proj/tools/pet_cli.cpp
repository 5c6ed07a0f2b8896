// pet: perceptual error toolkit CLI.
// Subcommands: synth, optimize <method>, analyze <what>. Every run writes a
// report.json with the resolved configuration and content hashes of all
// inputs. Exit codes: 0 ok, 2 config error, 3 I/O error, 4 numerical error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pet/analysis.hpp"
#include "pet/errors.hpp"
#include "pet/horizontal.hpp"
#include "pet/io.hpp"
#include "pet/masks.hpp"
#include "pet/model.hpp"
#include "pet/synth.hpp"
#include "pet/vertical.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pet;

namespace {

// ---------------------------------------------------------------- helpers

struct RunContext {
    std::string out_dir;
    json config;
    json inputs;   // path -> content hash
    json metrics;
    json outputs;  // list of written files

    std::string path(const std::string& name) const {
        return (fs::path(out_dir) / name).string();
    }
    void note_input(const std::string& p) { inputs[p] = file_hash_hex(p); }
    void note_output(const std::string& name) { outputs.push_back(name); }

    void write_report(const std::string& command) {
        json r;
        r["command"] = command;
        r["config"] = config;
        r["inputs"] = inputs;
        r["metrics"] = metrics;
        r["outputs"] = outputs;
        write_text_file(path("report.json"), r.dump(2) + "\n");
    }
};

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    while (true) {
        const size_t p = s.find(sep, start);
        parts.push_back(s.substr(start, p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return parts;
}

double parse_num(const std::string& s, const std::string& what) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("bad " + what + ": '" + s + "'");
    }
}

Kernel kernel_from_pfm(const std::string& path) {
    const ImageF img = read_pfm(path);
    if (img.channels != 1 || img.width != img.height || img.width % 2 == 0)
        throw ConfigError("kernel file must be an odd square single-channel PFM");
    Kernel k;
    k.radius = img.width / 2;
    k.weights = img.data;
    return k;
}

Kernel parse_kernel(const std::string& spec, RunContext* ctx) {
    const auto parts = split(spec, ':');
    const std::string& name = parts[0];
    if (name == "binomial") return Kernel::binomial3();
    if (name == "delta") return Kernel::delta();
    if (name == "gaussian" || name == "highpass") {
        if (parts.size() < 2) throw ConfigError("kernel '" + name + "' needs a sigma");
        const double sigma = parse_num(parts[1], "kernel sigma");
        const int radius = parts.size() > 2 ? int(parse_num(parts[2], "kernel radius")) : -1;
        return name == "gaussian" ? Kernel::gaussian(sigma, radius)
                                  : Kernel::highpass(sigma, radius);
    }
    if (name == "aniso") {
        if (parts.size() < 3) throw ConfigError("kernel 'aniso' needs two sigmas");
        const double sx = parse_num(parts[1], "kernel sigma");
        const double sy = parse_num(parts[2], "kernel sigma");
        const int radius = parts.size() > 3 ? int(parse_num(parts[3], "kernel radius")) : -1;
        return Kernel::gaussian_aniso(sx, sy, radius);
    }
    if (fs::exists(spec)) {
        Kernel k = kernel_from_pfm(spec);
        if (ctx) ctx->note_input(spec);
        return k;
    }
    throw ConfigError("unknown kernel spec '" + spec + "'");
}

ToneMap parse_tonemap(const std::string& s) {
    if (s == "identity") return ToneMap::Identity;
    if (s == "clamp01") return ToneMap::Clamp01;
    if (s == "aces") return ToneMap::Aces;
    throw ConfigError("unknown tone map '" + s + "' (identity|clamp01|aces)");
}

Boundary parse_boundary(const std::string& s) {
    if (s == "leaky") return Boundary::LeakyZeroPad;
    if (s == "reflect") return Boundary::Reflect;
    throw ConfigError("unknown boundary '" + s + "' (leaky|reflect)");
}

Traversal parse_order(const std::string& s) {
    if (s == "serpentine") return Traversal::Serpentine;
    if (s == "raster") return Traversal::Raster;
    if (s == "random") return Traversal::Random;
    throw ConfigError("unknown traversal '" + s + "' (serpentine|raster|random)");
}

// Options shared by every model-driven command.
struct ModelOpts {
    std::string kernel = "binomial";
    std::string ref_kernel = "delta";
    std::string tonemap = "clamp01";
    std::string boundary = "leaky";
    double sigma = 0.0;      // overrides kernel with gaussian:sigma
    double dpi = 0.0;        // with distance: derive sigma from viewing geometry
    double distance = 0.0;   // inches
    double confidence = 1.0;

    void attach(CLI::App* app) {
        app->add_option("--kernel", kernel,
                        "display kernel: binomial|delta|gaussian:S[:R]|highpass:S[:R]|"
                        "aniso:SX:SY[:R]|file.pfm");
        app->add_option("--ref-kernel", ref_kernel, "reference-side kernel (same specs)");
        app->add_option("--tonemap", tonemap, "identity|clamp01|aces");
        app->add_option("--boundary", boundary, "leaky|reflect");
        app->add_option("--sigma", sigma, "shortcut for --kernel gaussian:SIGMA");
        app->add_option("--dpi", dpi, "display resolution for viewing-derived sigma");
        app->add_option("--distance", distance, "viewing distance in inches (with --dpi)");
        app->add_option("--confidence", confidence, "surrogate confidence C in [0,1]");
    }

    PerceptualModel build(RunContext& ctx) const {
        PerceptualModel m;
        std::string kspec = kernel;
        if (dpi > 0.0 || distance > 0.0) {
            if (dpi <= 0.0 || distance <= 0.0)
                throw ConfigError("--dpi and --distance must be given together");
            char buf[64];
            std::snprintf(buf, sizeof buf, "gaussian:%.17g", sigma_from_viewing(dpi, distance));
            kspec = buf;
        } else if (sigma > 0.0) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "gaussian:%.17g", sigma);
            kspec = buf;
        }
        m.g = parse_kernel(kspec, &ctx);
        m.h = parse_kernel(ref_kernel, &ctx);
        m.tonemap = parse_tonemap(tonemap);
        m.boundary = parse_boundary(boundary);
        if (confidence < 0.0 || confidence > 1.0)
            throw ConfigError("--confidence must lie in [0,1]");
        m.confidence = confidence;
        ctx.config["kernel"] = kspec;
        ctx.config["ref_kernel"] = ref_kernel;
        ctx.config["tonemap"] = tonemap;
        ctx.config["boundary"] = boundary;
        ctx.config["confidence"] = confidence;
        return m;
    }
};

void write_vertical_outputs(RunContext& ctx, const VerticalResult& r) {
    write_selection(ctx.path("selection.pgm"), r.selection);
    ctx.note_output("selection.pgm");
    write_pfm(ctx.path("image.pfm"), r.image);
    ctx.note_output("image.pfm");
    write_ppm(ctx.path("preview.ppm"), r.image);
    ctx.note_output("preview.ppm");
    if (!r.trace.empty()) {
        write_trace_csv(ctx.path("trace.csv"), r.trace);
        ctx.note_output("trace.csv");
    }
}

void write_horizontal_outputs(RunContext& ctx, const HorizontalResult& r) {
    write_permutation_csv(ctx.path("permutation.csv"), r.perm);
    ctx.note_output("permutation.csv");
    write_displacement_map(ctx.path("displacement.pgm"), r.perm);
    ctx.note_output("displacement.pgm");
    write_pfm(ctx.path("image.pfm"), r.image);
    ctx.note_output("image.pfm");
    write_ppm(ctx.path("preview.ppm"), r.image);
    ctx.note_output("preview.ppm");
    if (!r.trace.empty()) {
        write_trace_csv(ctx.path("trace.csv"), r.trace);
        ctx.note_output("trace.csv");
    }
}

void add_energy_metrics(RunContext& ctx, const ImageF& img, const ImageF& ref,
                        const PerceptualModel& m) {
    const double e = perceptual_energy(img, ref, m);
    ctx.metrics["energy"] = e;
    ctx.metrics["pmse"] = e / (double(img.pixel_count()) * img.channels);
    ctx.metrics["mse"] = mse(img, ref);
}

// ---------------------------------------------------------------- commands

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
    RunContext ctx{out_dir};
    ensure_out_dir(out_dir);
    const std::string text = read_text_file(spec_path);
    ctx.note_input(spec_path);
    const SceneSpec spec = SceneSpec::from_json_text(text);
    ctx.config = json::parse(spec.to_json_text());

    const SynthResult r = generate(spec);
    write_stack(ctx.path("stack.pes"), r.stack);
    ctx.note_output("stack.pes");
    write_pfm(ctx.path("reference.pfm"), r.reference);
    ctx.note_output("reference.pfm");
    if (!r.stack.aux.alpha.empty()) {
        write_pfm(ctx.path("alpha.pfm"), r.stack.aux.alpha);
        ctx.note_output("alpha.pfm");
    }
    if (!r.stack.aux.beta.empty()) {
        write_pfm(ctx.path("beta.pfm"), r.stack.aux.beta);
        ctx.note_output("beta.pfm");
    }
    if (r.has_bank) {
        json bank;
        bank["kind"] = r.bank.kind == IntegrandBank::Kind::Linear ? "linear" : "heaviside";
        bank["thresholds"] = r.bank.thresholds;
        write_text_file(ctx.path("bank.json"), bank.dump(2) + "\n");
        ctx.note_output("bank.json");
    }
    ctx.write_report("synth");
    return 0;
}

struct VerticalArgs {
    std::string stack_path, surrogate_path, mask_path, out_dir;
    ModelOpts model;
    int sweeps = 100;
    uint64_t seed = 0;
    std::string order = "serpentine";
    size_t power_set_limit = 0;
};

int cmd_vertical(const std::string& method, const VerticalArgs& a) {
    RunContext ctx{a.out_dir};
    ensure_out_dir(a.out_dir);
    EstimateStack stack = read_stack(a.stack_path);
    ctx.note_input(a.stack_path);
    ctx.config["method"] = method;
    ctx.config["stack"] = a.stack_path;
    ctx.config["sweeps"] = a.sweeps;
    ctx.config["seed"] = a.seed;
    ctx.config["order"] = a.order;
    if (a.power_set_limit > 0) {
        stack = expand_power_set(stack, a.power_set_limit);
        ctx.config["power_set_limit"] = a.power_set_limit;
    }

    ImageF surrogate;
    PerceptualModel m;
    const bool needs_model = method != "histogram";
    if (needs_model) {
        surrogate = read_pfm(a.surrogate_path);
        ctx.note_input(a.surrogate_path);
        ctx.config["surrogate"] = a.surrogate_path;
        m = a.model.build(ctx);
    }

    VerticalResult r;
    if (method == "vertical-iterative") {
        r = iterative_minimize(stack, surrogate, m, a.sweeps, a.seed, parse_order(a.order));
    } else if (method == "error-diffusion") {
        r = error_diffusion(stack, surrogate, m, parse_order(a.order));
    } else if (method == "dither" || method == "histogram") {
        if (a.mask_path.empty()) throw ConfigError(method + " needs --mask");
        const DitherMask mask = read_mask(a.mask_path);
        ctx.note_input(a.mask_path);
        ctx.config["mask"] = a.mask_path;
        r = method == "dither" ? dither(stack, surrogate, mask, m)
                               : histogram_baseline(stack, mask);
    } else {
        throw ConfigError("unknown vertical method '" + method + "'");
    }

    write_vertical_outputs(ctx, r);
    ctx.metrics["sweeps"] = r.sweeps;
    if (!r.trace.empty()) ctx.metrics["final_objective"] = r.trace.back();
    if (needs_model) add_energy_metrics(ctx, r.image, surrogate, m);
    ctx.write_report("optimize " + method);
    return 0;
}

struct HorizontalArgs {
    std::string input_path, surrogate_path, mask_path, alpha_path, beta_path, out_dir;
    std::string target = "lowpass:1.0";
    ModelOpts model;
    int sweeps = 10;
    int search_radius = 1;
    double travel = 1.0;
    int tile = 8;
    uint64_t seed = 0;
    std::string order = "serpentine";
};

AuxPlanes load_aux(RunContext& ctx, const HorizontalArgs& a) {
    AuxPlanes aux;
    if (!a.alpha_path.empty()) {
        aux.alpha = read_pfm(a.alpha_path);
        ctx.note_input(a.alpha_path);
        ctx.config["alpha"] = a.alpha_path;
    }
    if (!a.beta_path.empty()) {
        aux.beta = read_pfm(a.beta_path);
        ctx.note_input(a.beta_path);
        ctx.config["beta"] = a.beta_path;
    }
    return aux;
}

int cmd_horizontal(const std::string& method, const HorizontalArgs& a) {
    RunContext ctx{a.out_dir};
    ensure_out_dir(a.out_dir);
    const ImageF input = read_pfm(a.input_path);
    ctx.note_input(a.input_path);
    ctx.config["method"] = method;
    ctx.config["input"] = a.input_path;

    HorizontalResult r;
    if (method == "horizontal-iterative") {
        const ImageF surrogate = read_pfm(a.surrogate_path);
        ctx.note_input(a.surrogate_path);
        ctx.config["surrogate"] = a.surrogate_path;
        ctx.config["sweeps"] = a.sweeps;
        ctx.config["search_radius"] = a.search_radius;
        ctx.config["travel"] = a.travel;
        ctx.config["order"] = a.order;
        const PerceptualModel m = a.model.build(ctx);
        const AuxPlanes aux = load_aux(ctx, a);
        r = horizontal_minimize(input, surrogate, m, Dissimilarity::disk(a.travel),
                                a.search_radius, a.sweeps, parse_order(a.order),
                                aux.empty() ? nullptr : &aux);
        add_energy_metrics(ctx, r.image, surrogate, m);
    } else if (method == "permutation") {
        if (a.mask_path.empty()) throw ConfigError("permutation needs --mask");
        const DitherMask mask = read_mask(a.mask_path);
        ctx.note_input(a.mask_path);
        ctx.config["mask"] = a.mask_path;
        ctx.config["tile"] = a.tile;
        const AuxPlanes aux = load_aux(ctx, a);
        if (!aux.empty()) {
            // baseline sorts demodulated values; the emitted image is the
            // re-rendered (remodulated) relocation
            const ImageF demod = demodulate(input, aux);
            r = permutation_baseline(demod, mask, a.tile);
            r.image = remodulate(r.image, aux);
        } else {
            r = permutation_baseline(input, mask, a.tile);
        }
    } else if (method == "shaped-noise") {
        ctx.config["sweeps"] = a.sweeps;
        ctx.config["seed"] = a.seed;
        ctx.config["target"] = a.target;
        Kernel target;
        const auto parts = split(a.target, ':');
        if (parts[0] == "lowpass") {
            target = Kernel::gaussian(parse_num(parts.at(1), "target sigma"));
        } else if (parts[0] == "highpass") {
            target = Kernel::highpass(parse_num(parts.at(1), "target sigma"));
        } else if (parts[0] == "varying") {
            const double s = parse_num(parts.at(1), "target sigma");
            const Kernel lo = Kernel::gaussian(s);
            const Kernel hi = Kernel::highpass(s, lo.radius);
            target = Kernel::blend_horizontal(lo, hi, input.width, input.height);
        } else {
            target = parse_kernel(a.target, &ctx);
        }
        r = shaped_noise(input, target, a.sweeps, a.seed);
    } else {
        throw ConfigError("unknown horizontal method '" + method + "'");
    }

    write_horizontal_outputs(ctx, r);
    ctx.metrics["sweeps"] = r.sweeps;
    if (!r.trace.empty()) ctx.metrics["final_objective"] = r.trace.back();
    ctx.write_report("optimize " + method);
    return 0;
}

struct AprioriArgs {
    std::string samples_path, bank = "linear", prefix_weights = "final", out_dir;
    ModelOpts model;
    int sweeps = 10;
    uint64_t seed = 0;
};

int cmd_apriori(const AprioriArgs& a) {
    RunContext ctx{a.out_dir};
    ensure_out_dir(a.out_dir);
    const EstimateStack samples = read_stack(a.samples_path);
    ctx.note_input(a.samples_path);
    ctx.config["method"] = "apriori";
    ctx.config["samples"] = a.samples_path;
    ctx.config["bank"] = a.bank;
    ctx.config["prefix_weights"] = a.prefix_weights;
    ctx.config["sweeps"] = a.sweeps;
    ctx.config["seed"] = a.seed;
    const PerceptualModel m = a.model.build(ctx);

    IntegrandBank bank;
    const auto parts = split(a.bank, ':');
    if (parts[0] == "linear") {
        bank = make_linear_bank();
    } else if (parts[0] == "heaviside") {
        const int count = parts.size() > 1 ? int(parse_num(parts[1], "bank count")) : 4;
        const uint64_t bseed = parts.size() > 2
                                   ? uint64_t(parse_num(parts[2], "bank seed"))
                                   : a.seed;
        bank = make_heaviside_bank(count, bseed);
    } else {
        throw ConfigError("unknown bank spec '" + a.bank + "' (linear|heaviside[:N[:SEED]])");
    }

    std::vector<std::vector<double>> weights(size_t(bank.count()),
                                             std::vector<double>(size_t(samples.m), 0.0));
    if (a.prefix_weights == "final") {
        for (auto& row : weights) row.back() = 1.0;
    } else if (a.prefix_weights == "uniform") {
        for (auto& row : weights)
            for (double& w : row) w = 1.0 / double(samples.m);
    } else {
        throw ConfigError("unknown prefix weighting '" + a.prefix_weights + "' (final|uniform)");
    }

    const AprioriResult r = apriori_optimize(bank, samples, weights, m, a.sweeps, a.seed);
    Permutation p = r.perm;
    write_permutation_csv(ctx.path("permutation.csv"), p);
    ctx.note_output("permutation.csv");
    write_displacement_map(ctx.path("displacement.pgm"), p);
    ctx.note_output("displacement.pgm");
    write_trace_csv(ctx.path("trace.csv"), r.trace);
    ctx.note_output("trace.csv");

    // relocated sample sets, ready for rendering
    EstimateStack relocated(samples.width, samples.height, samples.channels, samples.m);
    for (size_t i = 0; i < p.source.size(); ++i) {
        const int x = int(i) % samples.width, y = int(i) / samples.width;
        const int sx = int(p.source[i]) % samples.width, sy = int(p.source[i]) / samples.width;
        for (int k = 0; k < samples.m; ++k)
            *relocated.estimate(x, y, k) = *samples.estimate(sx, sy, k);
    }
    write_stack(ctx.path("samples.pes"), relocated);
    ctx.note_output("samples.pes");

    ctx.metrics["sweeps"] = r.sweeps;
    ctx.metrics["final_objective"] = r.trace.back();
    ctx.write_report("optimize apriori");
    return 0;
}

struct AnalyzeArgs {
    std::string input_path, ref_path, out_dir;
    std::vector<std::string> inputs;
    ModelOpts model;
    int tile = 32;
    int bins = 32;
    double cutoff = 0.125;
};

int cmd_analyze(const std::string& what, const AnalyzeArgs& a) {
    RunContext ctx{a.out_dir};
    ensure_out_dir(a.out_dir);
    ctx.config["what"] = what;

    if (what == "spectrum" || what == "tiled-spectrum") {
        ImageF img = read_pfm(a.input_path);
        ctx.note_input(a.input_path);
        ctx.config["input"] = a.input_path;
        if (!a.ref_path.empty()) {
            const ImageF ref = read_pfm(a.ref_path);
            ctx.note_input(a.ref_path);
            ctx.config["ref"] = a.ref_path;
            img = difference(img, ref);
        }
        if (what == "spectrum") {
            const Spectrum s = power_spectrum(img);
            // normalized log-power visualization
            double vmax = 0.0;
            std::vector<double> vals(s.power.size());
            for (size_t i = 0; i < s.power.size(); ++i) {
                vals[i] = std::log1p(s.power[i]);
                vmax = std::max(vmax, vals[i]);
            }
            std::vector<uint16_t> pix(vals.size());
            for (size_t i = 0; i < vals.size(); ++i)
                pix[i] = uint16_t(vmax > 0.0 ? std::lround(vals[i] / vmax * 65535.0) : 0);
            write_pgm16(ctx.path("spectrum.pgm"), s.width, s.height, pix);
            ctx.note_output("spectrum.pgm");

            ctx.config["bins"] = a.bins;
            const auto radial = radial_average(s, a.bins);
            std::string csv = "bin,radius,mean_power,count\n";
            char buf[128];
            for (size_t i = 0; i < radial.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%zu\n", i, radial[i].radius,
                              radial[i].mean_power, radial[i].count);
                csv += buf;
            }
            write_text_file(ctx.path("radial.csv"), csv);
            ctx.note_output("radial.csv");

            ctx.config["cutoff"] = a.cutoff;
            ctx.metrics["low_freq_ratio"] = low_freq_ratio(img, a.cutoff);
            ctx.metrics["lowest_octave_power"] = lowest_octave_power(s);
            ctx.metrics["highest_octave_power"] = highest_octave_power(s);
        } else {
            ctx.config["tile"] = a.tile;
            const ImageF tiles = tiled_spectrum(img, a.tile);
            write_pfm(ctx.path("tiled.pfm"), tiles);
            ctx.note_output("tiled.pfm");
            write_ppm(ctx.path("tiled.ppm"), tiles);
            ctx.note_output("tiled.ppm");
        }
        ctx.write_report("analyze " + what);
        return 0;
    }

    if (what == "metrics") {
        const ImageF img = read_pfm(a.input_path);
        ctx.note_input(a.input_path);
        ctx.config["input"] = a.input_path;
        const ImageF ref = read_pfm(a.ref_path);
        ctx.note_input(a.ref_path);
        ctx.config["ref"] = a.ref_path;
        const PerceptualModel m = a.model.build(ctx);
        add_energy_metrics(ctx, img, ref, m);
        ctx.config["cutoff"] = a.cutoff;
        ctx.metrics["low_freq_ratio"] = low_freq_ratio(difference(img, ref), a.cutoff);
        ctx.write_report("analyze metrics");
        return 0;
    }

    if (what == "compare") {
        if (a.inputs.empty()) throw ConfigError("compare needs at least one input");
        const ImageF ref = read_pfm(a.ref_path);
        ctx.note_input(a.ref_path);
        ctx.config["ref"] = a.ref_path;
        const PerceptualModel m = a.model.build(ctx);
        std::vector<ImageF> imgs;
        std::vector<const ImageF*> ptrs;
        std::vector<std::string> names;
        imgs.reserve(a.inputs.size());
        for (const std::string& p : a.inputs) {
            imgs.push_back(read_pfm(p));
            ctx.note_input(p);
            names.push_back(fs::path(p).filename().string());
        }
        for (const ImageF& img : imgs) ptrs.push_back(&img);
        const auto rows = compare_report(names, ptrs, ref, m);
        const std::string table = format_compare_table(rows);
        write_text_file(ctx.path("compare.txt"), table);
        ctx.note_output("compare.txt");
        json jr = json::array();
        for (const CompareRow& r : rows) {
            json row;
            row["name"] = r.name;
            row["mse"] = r.mse;
            row["pmse"] = r.pmse;
            row["low_freq_ratio"] = r.low_freq;
            row["energy"] = r.energy;
            jr.push_back(row);
        }
        ctx.metrics["rows"] = jr;
        ctx.write_report("analyze compare");
        std::cout << table;
        return 0;
    }

    throw ConfigError("unknown analysis '" + what + "'");
}

struct MaskArgs {
    std::string out_dir;
    int width = 64, height = 64;
    double sigma = 1.5;
    double density = 0.1;
    uint64_t seed = 0;
    std::string kind = "void-cluster";
};

int cmd_mask(const MaskArgs& a) {
    RunContext ctx{a.out_dir};
    ensure_out_dir(a.out_dir);
    ctx.config["kind"] = a.kind;
    ctx.config["width"] = a.width;
    ctx.config["height"] = a.height;
    ctx.config["seed"] = a.seed;
    DitherMask mask;
    if (a.kind == "void-cluster") {
        ctx.config["sigma"] = a.sigma;
        ctx.config["density"] = a.density;
        mask = void_and_cluster(a.width, a.height, a.seed, a.sigma, a.density);
    } else if (a.kind == "white-noise") {
        mask = white_noise_mask(a.width, a.height, a.seed);
    } else {
        throw ConfigError("unknown mask kind '" + a.kind + "' (void-cluster|white-noise)");
    }
    write_mask(ctx.path("mask.pgm"), mask);
    ctx.note_output("mask.pgm");
    ctx.write_report("mask");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"perceptual error toolkit"};
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads,
                   "worker threads (default: PET_THREADS env or 1)");

    // --- synth
    std::string synth_spec, synth_out;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic estimate stack");
    synth->add_option("--spec", synth_spec, "scene spec JSON file")->required();
    synth->add_option("--out", synth_out, "output directory")->required();

    // --- mask
    MaskArgs mask_args;
    CLI::App* mask_cmd = app.add_subcommand("mask", "generate a dither mask");
    mask_cmd->add_option("--out", mask_args.out_dir)->required();
    mask_cmd->add_option("--width", mask_args.width);
    mask_cmd->add_option("--height", mask_args.height);
    mask_cmd->add_option("--sigma", mask_args.sigma);
    mask_cmd->add_option("--density", mask_args.density);
    mask_cmd->add_option("--seed", mask_args.seed);
    mask_cmd->add_option("--kind", mask_args.kind, "void-cluster|white-noise");

    // --- optimize
    CLI::App* optimize = app.add_subcommand("optimize", "run an optimizer");
    optimize->require_subcommand(1);

    VerticalArgs va;
    std::vector<CLI::App*> vcmds;
    for (const char* name : {"vertical-iterative", "error-diffusion", "dither", "histogram"}) {
        CLI::App* c = optimize->add_subcommand(name);
        c->add_option("--stack", va.stack_path)->required();
        c->add_option("--surrogate", va.surrogate_path);
        c->add_option("--mask", va.mask_path);
        c->add_option("--out", va.out_dir)->required();
        c->add_option("--sweeps", va.sweeps);
        c->add_option("--seed", va.seed);
        c->add_option("--order", va.order);
        c->add_option("--power-set-limit", va.power_set_limit);
        va.model.attach(c);
        vcmds.push_back(c);
    }

    HorizontalArgs ha;
    std::vector<CLI::App*> hcmds;
    for (const char* name : {"horizontal-iterative", "permutation", "shaped-noise"}) {
        CLI::App* c = optimize->add_subcommand(name);
        c->add_option("--input", ha.input_path)->required();
        c->add_option("--surrogate", ha.surrogate_path);
        c->add_option("--mask", ha.mask_path);
        c->add_option("--alpha", ha.alpha_path);
        c->add_option("--beta", ha.beta_path);
        c->add_option("--out", ha.out_dir)->required();
        c->add_option("--sweeps", ha.sweeps);
        c->add_option("--seed", ha.seed);
        c->add_option("--order", ha.order);
        c->add_option("--search-radius", ha.search_radius);
        c->add_option("--travel", ha.travel);
        c->add_option("--tile", ha.tile);
        c->add_option("--target", ha.target);
        ha.model.attach(c);
        hcmds.push_back(c);
    }

    AprioriArgs aa;
    CLI::App* apriori = optimize->add_subcommand("apriori");
    apriori->add_option("--samples", aa.samples_path)->required();
    apriori->add_option("--bank", aa.bank, "linear|heaviside[:N[:SEED]]");
    apriori->add_option("--prefix-weights", aa.prefix_weights, "final|uniform");
    apriori->add_option("--out", aa.out_dir)->required();
    apriori->add_option("--sweeps", aa.sweeps);
    apriori->add_option("--seed", aa.seed);
    aa.model.attach(apriori);

    // --- analyze
    AnalyzeArgs an;
    CLI::App* analyze = app.add_subcommand("analyze", "spectra and metrics");
    analyze->require_subcommand(1);
    std::vector<CLI::App*> acmds;
    for (const char* name : {"spectrum", "tiled-spectrum", "metrics", "compare"}) {
        CLI::App* c = analyze->add_subcommand(name);
        c->add_option("--input", an.input_path);
        c->add_option("--inputs", an.inputs);
        c->add_option("--ref", an.ref_path);
        c->add_option("--out", an.out_dir)->required();
        c->add_option("--tile", an.tile);
        c->add_option("--bins", an.bins);
        c->add_option("--cutoff", an.cutoff);
        an.model.attach(c);
        acmds.push_back(c);
    }

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return app.exit(e);
        } catch (const CLI::ParseError& e) {
            app.exit(e);
            return 2;
        }

        if (threads <= 0) {
            const char* env = std::getenv("PET_THREADS");
            threads = env ? std::atoi(env) : 1;
        }
        set_thread_count(std::max(1, threads));
        std::cerr << "pet: using " << thread_count() << " worker thread(s)\n";

        const auto t0 = std::chrono::steady_clock::now();
        int rc = 0;
        if (synth->parsed()) {
            rc = cmd_synth(synth_spec, synth_out);
        } else if (mask_cmd->parsed()) {
            rc = cmd_mask(mask_args);
        } else if (optimize->parsed()) {
            CLI::App* sub = optimize->get_subcommands().front();
            const std::string name = sub->get_name();
            if (name == "apriori")
                rc = cmd_apriori(aa);
            else if (name == "horizontal-iterative" || name == "permutation" ||
                     name == "shaped-noise")
                rc = cmd_horizontal(name, ha);
            else
                rc = cmd_vertical(name, va);
        } else if (analyze->parsed()) {
            CLI::App* sub = analyze->get_subcommands().front();
            rc = cmd_analyze(sub->get_name(), an);
        }
        const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0);
        std::cerr << "pet: done in " << dt.count() << " ms\n";
        return rc;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
