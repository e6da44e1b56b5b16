// relight - batch enhancement of under-/over-exposed photos.
//
// Subcommands:
//   enhance  progressive per-image tone-map optimization (the main pipeline)
//   fuse     one-shot quality-score fusion of aligned exposures
//   score    dump the per-pixel quality measure planes for an image
//   refs     dump the randomized exposure references for an image
//   eval     PSNR/SSIM of a directory against a reference directory

#include <CLI11.hpp>

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "relight/codec.hpp"
#include "relight/fusion.hpp"
#include "relight/gamma_opt.hpp"
#include "relight/metrics.hpp"

namespace fs = std::filesystem;
using namespace relight;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitUsage = 2;

// ---------------------------------------------------------------------------
// Settings: defaults -> config file -> command-line overrides
// ---------------------------------------------------------------------------

struct RunSettings {
    EnhanceConfig enhance;
    std::uint64_t seed = 0;
    int jobs = 0;  // 0 = hardware concurrency
    bool emit_gamma = false;
    bool baseline_weighted_fusion = false;
};

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out;
    in >> out;
    if (in.fail() || !in.eof()) {
        throw ConfigError("config key '" + key + "': cannot parse value '" + value + "'");
    }
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true") return true;
    if (value == "0" || value == "false") return false;
    throw ConfigError("config key '" + key + "': expected 0/1/true/false, got '" + value + "'");
}

void apply_key(RunSettings& s, const std::string& key, const std::string& value) {
    EnhanceConfig& e = s.enhance;
    if (key == "seed") s.seed = parse_number<std::uint64_t>(key, value);
    else if (key == "n_refs") e.refgen.n_each_side = parse_number<int>(key, value);
    else if (key == "under_lo") e.refgen.under_lo = parse_number<double>(key, value);
    else if (key == "under_hi") e.refgen.under_hi = parse_number<double>(key, value);
    else if (key == "over_lo") e.refgen.over_lo = parse_number<double>(key, value);
    else if (key == "over_hi") e.refgen.over_hi = parse_number<double>(key, value);
    else if (key == "patch_k") e.quality.patch_k = parse_number<int>(key, value);
    else if (key == "mu") e.quality.mu_target = parse_number<double>(key, value);
    else if (key == "eps_e") e.quality.eps_e = parse_number<double>(key, value);
    else if (key == "eps_s") e.quality.eps_s = parse_number<double>(key, value);
    else if (key == "alpha") e.alpha = parse_number<double>(key, value);
    else if (key == "epochs") e.epochs = parse_number<int>(key, value);
    else if (key == "steps") e.inner_steps = parse_number<int>(key, value);
    else if (key == "lr") e.lr = parse_number<double>(key, value);
    else if (key == "work_size") e.work_size = parse_number<int>(key, value);
    else if (key == "optimizer") {
        if (value == "adam") e.optimizer = OptimizerKind::Adam;
        else if (value == "sgd") e.optimizer = OptimizerKind::Sgd;
        else throw ConfigError("config key 'optimizer': expected adam or sgd, got '" + value + "'");
    } else if (key == "jobs") s.jobs = parse_number<int>(key, value);
    else if (key == "emit_gamma") s.emit_gamma = parse_bool(key, value);
    else if (key == "baseline_weighted_fusion") s.baseline_weighted_fusion = parse_bool(key, value);
    else throw ConfigError("unknown config key '" + key + "'");
}

void load_config_file(RunSettings& s, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        auto trim = [](std::string v) {
            const auto b = v.find_first_not_of(" \t\r");
            const auto e = v.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
        };
        apply_key(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::string settings_as_config(const RunSettings& s) {
    const EnhanceConfig& e = s.enhance;
    std::ostringstream out;
    out << "seed=" << s.seed << "\n";
    out << "n_refs=" << e.refgen.n_each_side << "\n";
    out << "under_lo=" << format_double(e.refgen.under_lo) << "\n";
    out << "under_hi=" << format_double(e.refgen.under_hi) << "\n";
    out << "over_lo=" << format_double(e.refgen.over_lo) << "\n";
    out << "over_hi=" << format_double(e.refgen.over_hi) << "\n";
    out << "patch_k=" << e.quality.patch_k << "\n";
    out << "mu=" << format_double(e.quality.mu_target) << "\n";
    out << "eps_e=" << format_double(e.quality.eps_e) << "\n";
    out << "eps_s=" << format_double(e.quality.eps_s) << "\n";
    out << "alpha=" << format_double(e.alpha) << "\n";
    out << "epochs=" << e.epochs << "\n";
    out << "steps=" << e.inner_steps << "\n";
    out << "lr=" << format_double(e.lr) << "\n";
    out << "work_size=" << e.work_size << "\n";
    out << "optimizer=" << (e.optimizer == OptimizerKind::Adam ? "adam" : "sgd") << "\n";
    out << "jobs=" << s.jobs << "\n";
    out << "emit_gamma=" << (s.emit_gamma ? 1 : 0) << "\n";
    out << "baseline_weighted_fusion=" << (s.baseline_weighted_fusion ? 1 : 0) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Small file / hashing helpers
// ---------------------------------------------------------------------------

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const std::uint8_t*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::optional<std::vector<std::uint8_t>> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

// Write through a temp file in the same directory, then rename into place.
void atomic_write(const fs::path& path, const void* data, std::size_t n) {
    const fs::path tmp = path.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        if (!out) throw std::runtime_error("short write: " + tmp.string());
    }
    fs::rename(tmp, path);
}

void atomic_write(const fs::path& path, const std::string& text) {
    atomic_write(path, text.data(), text.size());
}

void atomic_write(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    atomic_write(path, bytes.data(), bytes.size());
}

bool has_image_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// Files stay as given; directories expand to their image files, sorted.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
    std::vector<fs::path> files;
    for (const std::string& in : inputs) {
        fs::path p(in);
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_regular_file() && has_image_extension(entry.path())) {
                    found.push_back(entry.path());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    return files;
}

void write_manifest(const fs::path& out_dir, const std::string& command, const RunSettings& s,
                    const std::vector<fs::path>& inputs) {
    std::ostringstream text;
    text << "# relight run manifest\n";
    text << "# command: " << command << "\n";
    text << settings_as_config(s);
    for (const fs::path& p : inputs) {
        auto bytes = read_file(p);
        if (bytes) {
            char hex[32];
            std::snprintf(hex, sizeof(hex), "%016llx",
                          static_cast<unsigned long long>(fnv1a64(bytes->data(), bytes->size())));
            text << "# input " << p.string() << " fnv1a=" << hex << "\n";
        } else {
            text << "# input " << p.string() << " unreadable\n";
        }
    }
    atomic_write(out_dir / "run_manifest.txt", text.str());
}

std::vector<std::uint8_t> gamma_bin_bytes(const GammaField& g) {
    const std::vector<double> gamma = g.gamma();
    std::vector<std::uint8_t> out;
    out.reserve(16 + gamma.size() * 4);
    out.insert(out.end(), {'G', 'M', 'A', 'P'});
    auto push_u32 = [&out](std::uint32_t v) {
        out.push_back(static_cast<std::uint8_t>(v & 0xff));
        out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
        out.push_back(static_cast<std::uint8_t>((v >> 24) & 0xff));
    };
    push_u32(static_cast<std::uint32_t>(g.height));
    push_u32(static_cast<std::uint32_t>(g.width));
    push_u32(3);
    for (double v : gamma) {
        const float f = static_cast<float>(v);
        std::uint32_t bits;
        static_assert(sizeof(bits) == sizeof(f));
        std::memcpy(&bits, &f, 4);
        push_u32(bits);
    }
    return out;
}

std::vector<std::uint8_t> plane_png_normalized(const PlaneF& p, double& mn, double& mx) {
    mn = p.data.empty() ? 0.0 : p.data[0];
    mx = mn;
    for (double v : p.data) {
        mn = std::min(mn, v);
        mx = std::max(mx, v);
    }
    ImageF img(p.width, p.height);
    const double span = mx - mn;
    for (std::size_t i = 0; i < p.data.size(); ++i) {
        const double v = span > 0.0 ? (p.data[i] - mn) / span : 0.0;
        img.data[i * 3] = img.data[i * 3 + 1] = img.data[i * 3 + 2] = v;
    }
    return encode_srgb8(img);
}

std::mutex g_stdout_mutex;

void say(const std::string& line) {
    std::lock_guard<std::mutex> lock(g_stdout_mutex);
    std::cout << line << "\n";
}

void complain(const std::string& line) {
    std::lock_guard<std::mutex> lock(g_stdout_mutex);
    std::cerr << "error: " << line << "\n";
}

// ---------------------------------------------------------------------------
// Subcommand drivers
// ---------------------------------------------------------------------------

int run_enhance(const RunSettings& settings, const std::vector<fs::path>& inputs,
                const fs::path& out_dir) {
    const int jobs = settings.jobs > 0
                         ? settings.jobs
                         : std::max(1u, std::thread::hardware_concurrency());
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= inputs.size()) return;
            const fs::path& path = inputs[i];
            try {
                const ImageF input = load_image(path.string());
                EnhanceConfig cfg = settings.enhance;
                cfg.refgen.seed = settings.seed ^ fnv1a64(path.filename().string());
                cfg.fusion = settings.baseline_weighted_fusion ? FusionMode::WeightedSum
                                                               : FusionMode::Argmax;
                const EnhanceResult res = progressive_enhance(input, cfg);

                const std::string stem = path.stem().string();
                atomic_write(out_dir / (stem + "_enhanced.png"), encode_srgb8(res.output));
                std::ostringstream csv;
                res.trace.write_csv(csv);
                atomic_write(out_dir / (stem + "_trace.csv"), csv.str());
                if (settings.emit_gamma) {
                    atomic_write(out_dir / (stem + "_gamma.bin"), gamma_bin_bytes(res.gamma));
                }

                char line[256];
                std::snprintf(line, sizeof(line), "ok %s %dx%d epochs=%d final_total=%.6g",
                              path.filename().string().c_str(), input.width, input.height,
                              cfg.epochs, res.trace.records.back().loss.total);
                say(line);
            } catch (const std::exception& e) {
                complain(path.string() + ": " + e.what());
                failures.fetch_add(1);
            }
        }
    };

    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return failures.load() > 0 ? kExitPartial : kExitOk;
}

int run_fuse(const RunSettings& settings, const std::vector<fs::path>& inputs,
             const fs::path& out_dir) {
    if (inputs.size() < 2) {
        complain("fuse needs at least two aligned images");
        return kExitUsage;
    }
    CandidateSet set;
    for (const fs::path& p : inputs) {
        set.candidates.push_back(load_image(p.string()));
        set.labels.push_back(p.filename().string());
        if (set.candidates.size() > 1 && !set.candidates.back().same_size(set.candidates.front())) {
            complain("dimension mismatch between " + inputs.front().string() + " and " +
                     p.string());
            return kExitUsage;
        }
    }
    const std::string stem = inputs.front().stem().string();
    if (settings.baseline_weighted_fusion) {
        const ImageF blend = fuse_weighted(set, settings.enhance.quality);
        atomic_write(out_dir / (stem + "_fused.png"), encode_srgb8(blend));
        say("ok " + stem + "_fused.png (weighted baseline)");
    } else {
        const FusionResult res = fuse(set, settings.enhance.quality);
        atomic_write(out_dir / (stem + "_fused.png"), encode_srgb8(res.pseudo_gt));
        atomic_write(out_dir / (stem + "_winners.png"),
                     encode_indexed_png(res.winner_index, res.pseudo_gt.width,
                                        res.pseudo_gt.height));
        say("ok " + stem + "_fused.png + winner map");
    }
    return kExitOk;
}

int run_score(const RunSettings& settings, const std::vector<fs::path>& inputs,
              const fs::path& out_dir) {
    if (inputs.size() != 1) {
        complain("score takes exactly one image");
        return kExitUsage;
    }
    const ImageF img = load_image(inputs.front().string());
    const QualityMaps maps = composite_score(img, settings.enhance.quality);
    const std::string stem = inputs.front().stem().string();

    std::ostringstream stats;
    const struct {
        const char* suffix;
        const PlaneF* plane;
    } planes[] = {{"E", &maps.exposedness},
                  {"C", &maps.contrast},
                  {"S", &maps.saturation},
                  {"score", &maps.composite}};
    for (const auto& [suffix, plane] : planes) {
        double mn = 0.0, mx = 0.0;
        atomic_write(out_dir / (stem + "_" + suffix + ".png"), plane_png_normalized(*plane, mn, mx));
        stats << suffix << " min=" << format_double(mn) << " max=" << format_double(mx) << "\n";
    }
    atomic_write(out_dir / (stem + "_stats.txt"), stats.str());
    say("ok " + stem + ": E/C/S/score planes + stats");
    return kExitOk;
}

int run_refs(const RunSettings& settings, const std::vector<fs::path>& inputs,
             const fs::path& out_dir) {
    if (inputs.size() != 1) {
        complain("refs takes exactly one image");
        return kExitUsage;
    }
    const fs::path& path = inputs.front();
    const ImageF img = load_image(path.string());
    RefGenConfig cfg = settings.enhance.refgen;
    cfg.seed = settings.seed ^ fnv1a64(path.filename().string());
    const auto refs = sample_references(img, cfg);
    const std::string stem = path.stem().string();
    for (std::size_t i = 0; i < refs.size(); ++i) {
        char name[160];
        std::snprintf(name, sizeof(name), "%s_%s_g%.4f.png", stem.c_str(),
                      refs[i].label.c_str(), refs[i].gamma);
        atomic_write(out_dir / name, encode_srgb8(refs[i].image));
    }
    say("ok " + stem + ": " + std::to_string(refs.size()) + " references");
    return kExitOk;
}

int run_eval(const RunSettings&, const std::vector<std::string>& raw_inputs,
             const fs::path& out_dir) {
    if (raw_inputs.size() != 2) {
        complain("eval takes exactly two directories: <candidates> <references>");
        return kExitUsage;
    }
    const fs::path cand_dir(raw_inputs[0]), ref_dir(raw_inputs[1]);
    if (!fs::is_directory(cand_dir) || !fs::is_directory(ref_dir)) {
        complain("eval arguments must be directories");
        return kExitUsage;
    }
    std::vector<fs::path> cands = expand_inputs({cand_dir.string()});
    if (cands.empty()) {
        complain("no candidate images in " + cand_dir.string());
        return kExitUsage;
    }

    int failures = 0;
    std::ostringstream csv;
    csv << "name,psnr,ssim\n";
    for (const fs::path& c : cands) {
        const fs::path r = ref_dir / c.filename();
        try {
            if (!fs::exists(r)) throw std::runtime_error("no reference pair: " + r.string());
            const MetricReport rep = evaluate(load_image(c.string()), load_image(r.string()));
            char line[256];
            std::snprintf(line, sizeof(line), "%s, %.4f, %.6f", c.filename().string().c_str(),
                          rep.psnr, rep.ssim);
            say(line);
            std::snprintf(line, sizeof(line), "%s,%.4f,%.6f\n", c.filename().string().c_str(),
                          rep.psnr, rep.ssim);
            csv << line;
        } catch (const std::exception& e) {
            complain(e.what());
            ++failures;
        }
    }
    atomic_write(out_dir / "eval.csv", csv.str());
    return failures > 0 ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relight - self-supervised exposure correction"};
    app.require_subcommand(1);

    std::string out_dir_str;
    std::string config_path;
    std::vector<std::string> inputs;
    RunSettings settings;

    // Flag values are tri-state so config-file settings survive unless the
    // flag is actually given.
    std::optional<std::uint64_t> opt_seed;
    std::optional<double> opt_alpha, opt_lr, opt_mu;
    std::optional<int> opt_epochs, opt_steps, opt_nrefs, opt_patchk, opt_worksize, opt_jobs;
    bool flag_emit_gamma = false, flag_weighted = false;

    auto add_common = [&](CLI::App* cmd, bool inputs_required) {
        cmd->add_option("-o,--out", out_dir_str, "output directory")->required();
        cmd->add_option("--config", config_path, "key=value config file");
        cmd->add_option("--seed", opt_seed, "master RNG seed");
        cmd->add_option("--alpha", opt_alpha, "total-variation weight");
        cmd->add_option("--epochs", opt_epochs, "progressive epochs");
        cmd->add_option("--steps", opt_steps, "gradient steps per epoch");
        cmd->add_option("--lr", opt_lr, "optimizer step size");
        cmd->add_option("--n-refs", opt_nrefs, "references per side (N)");
        cmd->add_option("--patch-k", opt_patchk, "quality patch window (odd)");
        cmd->add_option("--mu", opt_mu, "well-exposed level");
        cmd->add_option("--work-size", opt_worksize, "optimization resolution (0 = native)");
        cmd->add_option("--jobs", opt_jobs, "worker threads (0 = logical cores)");
        cmd->add_flag("--emit-gamma", flag_emit_gamma, "also write <stem>_gamma.bin");
        cmd->add_flag("--baseline-weighted-fusion", flag_weighted,
                      "use the score-weighted-average fusion baseline");
        auto* opt = cmd->add_option("inputs", inputs, "input files or directories");
        if (inputs_required) opt->required();
    };

    CLI::App* cmd_enhance = app.add_subcommand("enhance", "progressively enhance images");
    CLI::App* cmd_fuse = app.add_subcommand("fuse", "fuse aligned exposures");
    CLI::App* cmd_score = app.add_subcommand("score", "dump quality measure planes");
    CLI::App* cmd_refs = app.add_subcommand("refs", "dump randomized references");
    CLI::App* cmd_eval = app.add_subcommand("eval", "PSNR/SSIM against references");
    for (CLI::App* c : {cmd_enhance, cmd_fuse, cmd_score, cmd_refs, cmd_eval}) {
        add_common(c, true);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (!config_path.empty()) load_config_file(settings, config_path);
        if (opt_seed) settings.seed = *opt_seed;
        if (opt_alpha) settings.enhance.alpha = *opt_alpha;
        if (opt_epochs) settings.enhance.epochs = *opt_epochs;
        if (opt_steps) settings.enhance.inner_steps = *opt_steps;
        if (opt_lr) settings.enhance.lr = *opt_lr;
        if (opt_nrefs) settings.enhance.refgen.n_each_side = *opt_nrefs;
        if (opt_patchk) settings.enhance.quality.patch_k = *opt_patchk;
        if (opt_mu) settings.enhance.quality.mu_target = *opt_mu;
        if (opt_worksize) settings.enhance.work_size = *opt_worksize;
        if (opt_jobs) settings.jobs = *opt_jobs;
        if (flag_emit_gamma) settings.emit_gamma = true;
        if (flag_weighted) settings.baseline_weighted_fusion = true;
        validate(settings.enhance);
    } catch (const std::exception& e) {
        complain(e.what());
        return kExitUsage;
    }

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        const fs::path out_dir(out_dir_str);
        fs::create_directories(out_dir);

        if (command == "eval") {
            // eval pairs two directories; manifest still records the run.
            write_manifest(out_dir, command, settings, expand_inputs({inputs[0]}));
            return run_eval(settings, inputs, out_dir);
        }

        const std::vector<fs::path> files = expand_inputs(inputs);
        if (files.empty()) {
            complain("no inputs (empty directory or no image files given)");
            return kExitUsage;
        }
        write_manifest(out_dir, command, settings, files);

        if (command == "enhance") return run_enhance(settings, files, out_dir);
        if (command == "fuse") return run_fuse(settings, files, out_dir);
        if (command == "score") return run_score(settings, files, out_dir);
        if (command == "refs") return run_refs(settings, files, out_dir);
        complain("unknown command");
        return kExitUsage;
    } catch (const std::exception& e) {
        complain(e.what());
        return kExitPartial;
    }
}
