// radiomap: batch CLI over the radiomap library. Subcommands: features, fuse,
// eval, curve, stats, phantom. Structured output is JSON with a schema_version
// field; failures print one machine-readable error line on stderr and exit
// with a code that distinguishes usage (2), configuration (3), and I/O or
// input-format (4) problems.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "radiomap/radiomap.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kSchemaVersion = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConfig = 3;
constexpr int kExitIo = 4;

void print_error(int code, const std::string& kind, const std::string& message) {
    json j;
    j["error"] = {{"exit_code", code}, {"kind", kind}, {"message", message}};
    std::cerr << j.dump() << "\n";
}

struct FeatureOptions {
    std::string input;
    int slice = 0;
    bool want_cr = false;
    bool want_re = false;
    radiomap::CrParams cr;
    radiomap::GlcmParams re;
    std::string out_stem;
    int threads = 1;
    std::string config_path;
};

radiomap::GrayImage load_input_image(const std::string& path, int slice) {
    const auto bytes = radiomap::read_file_bytes(path);
    const auto ext = fs::path(path).extension().string();
    if (ext == ".nii") {
        auto [img, meta] = radiomap::load_nifti_slice(bytes, radiomap::SliceAxis::axial, slice);
        return img;
    }
    return radiomap::load_pgm(bytes);
}

// --config JSON overrides built-in defaults; explicit flags still win, so the
// caller applies it before copying flag values that were actually passed.
void apply_config_file(FeatureOptions& opt) {
    if (opt.config_path.empty()) return;
    const auto bytes = radiomap::read_file_bytes(opt.config_path);
    json j;
    try {
        j = json::parse(std::string(bytes.begin(), bytes.end()));
    } catch (const json::exception& e) {
        throw radiomap::InvalidArgument(std::string("config file is not valid JSON: ") + e.what());
    }
    try {
        if (j.contains("cr")) {
            opt.cr.half_size = j["cr"].value("s", opt.cr.half_size);
            opt.cr.sum_count = j["cr"].value("num", opt.cr.sum_count);
            opt.cr.drop_count = j["cr"].value("m", opt.cr.drop_count);
        }
        if (j.contains("re")) {
            opt.re.half_size = j["re"].value("s", opt.re.half_size);
            opt.re.alpha = j["re"].value("alpha", opt.re.alpha);
        }
        opt.threads = j.value("threads", opt.threads);
    } catch (const json::exception& e) {
        throw radiomap::InvalidArgument(std::string("config file: ") + e.what());
    }
}

std::vector<radiomap::NamedMap> compute_feature_maps(const radiomap::QuantizedImage& quant,
                                                     const FeatureOptions& opt) {
    const int threads = radiomap::resolve_thread_count(opt.threads);
    std::vector<radiomap::NamedMap> maps;
    if (opt.want_cr)
        maps.push_back({"cr", radiomap::cr_map_fast(quant, opt.cr, threads)});
    if (opt.want_re)
        maps.push_back({"re", radiomap::re_map_fast(quant, opt.re, threads)});
    return maps;
}

int run_features(const FeatureOptions& opt, bool fuse_with_raw, bool normalize_features) {
    if (!opt.want_cr && !opt.want_re)
        throw radiomap::InvalidArgument("nothing to compute: pass --cr and/or --re");

    const auto raw = load_input_image(opt.input, opt.slice);
    const auto normalized = radiomap::minmax_normalize(raw);
    const auto quant = radiomap::quantize(normalized);
    const auto maps = compute_feature_maps(quant, opt);

    json summary;
    summary["schema_version"] = kSchemaVersion;
    if (fuse_with_raw) {
        const auto stack = radiomap::build_stack(normalized, maps, normalize_features);
        radiomap::export_stack(stack, opt.out_stem);
        for (const auto& ch : stack.channels) summary["channels"].push_back(ch.name);
    } else {
        radiomap::save_raster(opt.out_stem, maps);
        for (const auto& ch : maps) summary["channels"].push_back(ch.name);
    }
    summary["written"] = {opt.out_stem + ".bin", opt.out_stem + ".json"};
    std::cout << summary.dump() << "\n";
    return 0;
}

struct SlicePair {
    std::string name;
    fs::path pred;
    fs::path gt;
};

std::vector<SlicePair> collect_pairs(const std::string& pred_dir, const std::string& gt_dir) {
    auto list_files = [](const fs::path& dir) {
        if (!fs::is_directory(dir))
            throw radiomap::IoError("not a directory: " + dir.string());
        std::map<std::string, fs::path> files;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file())
                files[entry.path().filename().string()] = entry.path();
        return files;
    };
    const auto pred_files = list_files(pred_dir);
    const auto gt_files = list_files(gt_dir);

    // Silent skips would corrupt fold statistics, so unpaired files fail.
    for (const auto& [name, path] : pred_files)
        if (!gt_files.count(name))
            throw radiomap::InvalidArgument("unpaired prediction file: " + name);
    for (const auto& [name, path] : gt_files)
        if (!pred_files.count(name))
            throw radiomap::InvalidArgument("unpaired ground-truth file: " + name);

    std::vector<SlicePair> pairs;
    for (const auto& [name, path] : pred_files)
        pairs.push_back({name, path, gt_files.at(name)});
    return pairs;
}

int run_eval(const std::string& pred, const std::string& gt, const std::string& pred_dir,
             const std::string& gt_dir, const std::string& csv_path) {
    std::vector<SlicePair> pairs;
    if (!pred.empty()) {
        pairs.push_back({fs::path(pred).filename().string(), pred, gt});
    } else {
        pairs = collect_pairs(pred_dir, gt_dir);
    }

    std::vector<double> dices, precisions, sensitivities;
    std::string csv = "name,dice,precision,sensitivity\n";
    for (const auto& pair : pairs) {
        const auto p = radiomap::load_mask_pgm(radiomap::read_file_bytes(pair.pred));
        const auto g = radiomap::load_mask_pgm(radiomap::read_file_bytes(pair.gt));
        const auto c = radiomap::confusion(p, g);
        const double d = radiomap::dice(c);
        const double pr = radiomap::precision(c);
        const double se = radiomap::sensitivity(c);
        dices.push_back(d);
        precisions.push_back(pr);
        sensitivities.push_back(se);
        char row[256];
        std::snprintf(row, sizeof(row), "%s,%.9g,%.9g,%.9g\n", pair.name.c_str(), d, pr, se);
        csv += row;
    }
    if (!csv_path.empty()) {
        radiomap::write_file_bytes(csv_path,
                                   std::span<const std::uint8_t>(
                                       reinterpret_cast<const std::uint8_t*>(csv.data()),
                                       csv.size()));
    }

    auto summarize = [](const std::vector<double>& v) {
        const auto s = radiomap::aggregate(v);
        return json{{"mean", s.mean}, {"sd", s.sd}};
    };
    json out;
    out["schema_version"] = kSchemaVersion;
    out["n_slices"] = pairs.size();
    out["dice"] = summarize(dices);
    out["precision"] = summarize(precisions);
    out["sensitivity"] = summarize(sensitivities);
    std::cout << out.dump() << "\n";
    return 0;
}

int run_curve(const std::string& path) {
    const auto bytes = radiomap::read_file_bytes(path);
    const auto curve = radiomap::load_curve(std::string(bytes.begin(), bytes.end()));
    std::printf("%.6f\n", radiomap::sdd(curve));
    return 0;
}

int run_stats(const std::string& path, std::size_t comparisons, const std::string& sided) {
    const auto bytes = radiomap::read_file_bytes(path);
    const auto samples = radiomap::load_paired_csv(std::string(bytes.begin(), bytes.end()));
    const auto alt = sided == "greater" ? radiomap::Alternative::greater
                                        : radiomap::Alternative::two_sided;
    const auto result = radiomap::wilcoxon_signed_rank(samples, alt);
    if (comparisons < 1)
        throw radiomap::InvalidArgument("--comparisons must be >= 1");
    const double adjusted = radiomap::bonferroni({result.p}, comparisons).front();

    json out;
    out["schema_version"] = kSchemaVersion;
    out["n"] = result.n;
    out["w"] = result.w;
    out["p_raw"] = result.p;
    out["comparisons"] = comparisons;
    out["p_adjusted"] = adjusted;
    out["alternative"] = sided == "greater" ? "greater" : "two_sided";
    out["exact"] = result.exact;
    std::cout << out.dump() << "\n";
    return 0;
}

int run_phantom(const std::string& spec_path, std::optional<std::uint64_t> seed_override,
                const std::string& out_stem) {
    const auto bytes = radiomap::read_file_bytes(spec_path);
    auto spec = radiomap::phantom_spec_from_json(std::string(bytes.begin(), bytes.end()));
    if (seed_override) spec.seed = *seed_override;

    const auto [img, mask] = radiomap::generate(spec);

    // PGM is 8-bit integer, so clamp-and-round for export; the mask is exact.
    radiomap::GrayImage quantized = img;
    for (double& v : quantized.values)
        v = std::clamp(std::floor(v + 0.5), 0.0, 255.0);

    const std::string img_path = out_stem + "_image.pgm";
    const std::string mask_path = out_stem + "_mask.pgm";
    radiomap::write_file_bytes(img_path, radiomap::save_pgm(quantized, 255));
    radiomap::write_file_bytes(mask_path, radiomap::save_mask_pgm(mask));

    json out;
    out["schema_version"] = kSchemaVersion;
    out["written"] = {img_path, mask_path};
    out["seed"] = spec.seed;
    std::cout << out.dump() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radiomic feature maps (CR, Renyi entropy over GLCM), channel fusion, "
                 "segmentation metrics, SDD curve stability, and Wilcoxon/Bonferroni stats"};
    app.require_subcommand(1);

    FeatureOptions opt;
    bool no_normalize = false;

    auto add_feature_flags = [&](CLI::App* cmd) {
        cmd->add_option("--in", opt.input, "input image (.pgm, or .nii with --slice)")
            ->required();
        cmd->add_option("--slice", opt.slice, "axial slice index for NIfTI input");
        cmd->add_flag("--cr", opt.want_cr, "compute the concentration-rate map");
        cmd->add_flag("--re", opt.want_re, "compute the Renyi-entropy map");
        cmd->add_option("--cr-s", opt.cr.half_size, "CR window half-size s");
        cmd->add_option("--num", opt.cr.sum_count, "CR: high-intensity pixels to sum");
        cmd->add_option("--m", opt.cr.drop_count, "CR: highest pixels to exclude");
        cmd->add_option("--re-s", opt.re.half_size, "RE window half-size s");
        cmd->add_option("--alpha", opt.re.alpha, "Renyi order alpha");
        cmd->add_option("--out", opt.out_stem, "output path stem (.bin/.json)")->required();
        cmd->add_option("--threads", opt.threads, "worker threads (0 = auto)");
        cmd->add_option("--config", opt.config_path, "JSON config overriding defaults");
    };

    auto* features_cmd = app.add_subcommand("features", "extract feature maps from one slice");
    add_feature_flags(features_cmd);

    auto* fuse_cmd = app.add_subcommand("fuse", "export raw + feature channels as one stack");
    add_feature_flags(fuse_cmd);
    fuse_cmd->add_flag("--no-normalize", no_normalize,
                       "keep raw feature values instead of per-channel min-max");

    std::string pred, gt, pred_dir, gt_dir, csv_path;
    auto* eval_cmd = app.add_subcommand("eval", "score predicted masks against ground truth");
    eval_cmd->add_option("--pred", pred, "predicted mask (PGM)");
    eval_cmd->add_option("--gt", gt, "ground-truth mask (PGM)");
    eval_cmd->add_option("--pred-dir", pred_dir, "directory of predicted masks");
    eval_cmd->add_option("--gt-dir", gt_dir, "directory of ground-truth masks");
    eval_cmd->add_option("--csv", csv_path, "write per-slice metrics CSV here");

    std::string curve_path;
    auto* curve_cmd = app.add_subcommand("curve", "SDD of a validation curve CSV");
    curve_cmd->add_option("--in", curve_path, "CSV with a \"score\" column")->required();

    std::string stats_path, sided = "two";
    std::size_t comparisons = 1;
    auto* stats_cmd = app.add_subcommand("stats", "Wilcoxon signed-rank on paired CSV");
    stats_cmd->add_option("--in", stats_path, "CSV with \"baseline\",\"treatment\" columns")
        ->required();
    stats_cmd->add_option("--comparisons", comparisons, "Bonferroni comparison count");
    stats_cmd->add_option("--sided", sided, "two | greater")
        ->check(CLI::IsMember({"two", "greater"}));

    std::string spec_path, phantom_stem;
    std::optional<std::uint64_t> seed_override;
    auto* phantom_cmd = app.add_subcommand("phantom", "generate a synthetic slice + mask");
    phantom_cmd->add_option("--spec", spec_path, "phantom spec JSON")->required();
    phantom_cmd->add_option("--seed", seed_override, "override the spec's seed");
    phantom_cmd->add_option("--out", phantom_stem, "output stem (_image.pgm, _mask.pgm)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exits 0
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error(kExitUsage, "usage", e.what());
        return kExitUsage;
    }

    try {
        if (*features_cmd || *fuse_cmd) apply_config_file(opt);

        if (*features_cmd) return run_features(opt, false, true);
        if (*fuse_cmd) return run_features(opt, true, !no_normalize);
        if (*eval_cmd) {
            const bool single = !pred.empty() || !gt.empty();
            const bool dirs = !pred_dir.empty() || !gt_dir.empty();
            if (single == dirs || (single && (pred.empty() || gt.empty())) ||
                (dirs && (pred_dir.empty() || gt_dir.empty())))
                throw radiomap::InvalidArgument(
                    "eval needs either --pred/--gt or --pred-dir/--gt-dir");
            return run_eval(pred, gt, pred_dir, gt_dir, csv_path);
        }
        if (*curve_cmd) return run_curve(curve_path);
        if (*stats_cmd) return run_stats(stats_path, comparisons, sided);
        if (*phantom_cmd) return run_phantom(spec_path, seed_override, phantom_stem);
    } catch (const radiomap::ParseError& e) {
        print_error(kExitIo, "parse", e.what());
        return kExitIo;
    } catch (const radiomap::IoError& e) {
        print_error(kExitIo, "io", e.what());
        return kExitIo;
    } catch (const radiomap::InvalidArgument& e) {
        print_error(kExitConfig, "config", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        print_error(1, "internal", e.what());
        return 1;
    }
    return 0;
}
