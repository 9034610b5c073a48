// End-to-end checks of the radiomap binary: each subcommand is a thin wrapper,
// so its file/stdout output must equal the corresponding library call.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "radiomap/radiomap.hpp"
#include "test_support.hpp"

using namespace radiomap;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const auto out_path = dir / "stdout.txt";
    const auto err_path = dir / "stderr.txt";
    const std::string cmd = std::string(RADIOMAP_CLI_PATH) + " " + args + " >" +
                            out_path.string() + " 2>" + err_path.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

fs::path fresh_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("radiomap_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

GrayImage small_slice() {
    auto img = make_gray_image(24, 20);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 24; ++x)
            img.at(x, y) = double((x * 7 + y * 13) % 251);
    return img;
}

} // namespace

TEST_CASE("cli features matches the library pipeline bitwise") {
    const auto dir = fresh_dir("features");
    const auto img = small_slice();
    write_file_bytes(dir / "slice.pgm", save_pgm(img, 255));

    const auto stem = (dir / "maps").string();
    const auto r = run_cli("features --in " + (dir / "slice.pgm").string() +
                               " --cr --re --out " + stem,
                           dir);
    REQUIRE(r.exit_code == 0);

    const auto summary = json::parse(r.out);
    CHECK(summary["schema_version"] == 1);
    CHECK(summary["channels"] == json::array({"cr", "re"}));

    const auto loaded = load_raster(stem);
    REQUIRE(loaded.size() == 2);
    CHECK(loaded[0].name == "cr");
    CHECK(loaded[1].name == "re");

    const auto quant = quantize(minmax_normalize(img));
    const auto cr = cr_map_fast(quant, CrParams{});
    const auto re = re_map_fast(quant, GlcmParams{});
    for (std::size_t i = 0; i < cr.values.size(); ++i) {
        CHECK(loaded[0].map.values[i] == double(float(cr.values[i])));
        CHECK(loaded[1].map.values[i] == double(float(re.values[i])));
    }
}

TEST_CASE("cli features reads nifti slices") {
    const auto dir = fresh_dir("features_nifti");
    VolumeMeta meta;
    meta.dims = {16, 12, 3};
    meta.datatype = NiftiDatatype::i16;
    std::vector<float> raw(16 * 12 * 3);
    for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = float(int(i * 31 % 997) - 200);
    write_file_bytes(dir / "vol.nii", save_nifti(meta, raw));

    const auto stem = (dir / "maps").string();
    const auto r = run_cli("features --in " + (dir / "vol.nii").string() +
                               " --slice 1 --cr --out " + stem,
                           dir);
    REQUIRE(r.exit_code == 0);

    const auto [slice, m] = load_nifti_slice(read_file_bytes(dir / "vol.nii"),
                                             SliceAxis::axial, 1);
    const auto cr = cr_map_fast(quantize(minmax_normalize(slice)), CrParams{});
    const auto loaded = load_raster(stem);
    REQUIRE(loaded.size() == 1);
    for (std::size_t i = 0; i < cr.values.size(); ++i)
        CHECK(loaded[0].map.values[i] == double(float(cr.values[i])));
}

TEST_CASE("cli fuse exports flair + features") {
    const auto dir = fresh_dir("fuse");
    const auto img = small_slice();
    write_file_bytes(dir / "slice.pgm", save_pgm(img, 255));

    const auto stem = (dir / "stack").string();
    const auto r = run_cli("fuse --in " + (dir / "slice.pgm").string() +
                               " --cr --re --out " + stem,
                           dir);
    REQUIRE(r.exit_code == 0);
    const auto summary = json::parse(r.out);
    CHECK(summary["channels"] == json::array({"flair", "cr", "re"}));

    const auto normalized = minmax_normalize(img);
    const auto quant = quantize(normalized);
    std::vector<NamedMap> maps;
    maps.push_back({"cr", cr_map_fast(quant, CrParams{})});
    maps.push_back({"re", re_map_fast(quant, GlcmParams{})});
    const auto stack = build_stack(normalized, maps, true);

    const auto loaded = load_raster(stem);
    REQUIRE(loaded.size() == 3);
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < loaded[c].map.values.size(); ++i)
            CHECK(loaded[c].map.values[i] == double(float(stack.channels[c].map.values[i])));
}

TEST_CASE("cli config file overrides defaults, flags override config") {
    const auto dir = fresh_dir("config");
    const auto img = small_slice();
    write_file_bytes(dir / "slice.pgm", save_pgm(img, 255));
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"cr": {"s": 1, "num": 3, "m": 1}})";
    }

    const auto stem = (dir / "maps").string();
    const auto r = run_cli("features --in " + (dir / "slice.pgm").string() +
                               " --cr --config " + (dir / "cfg.json").string() +
                               " --out " + stem,
                           dir);
    REQUIRE(r.exit_code == 0);

    const auto cr = cr_map_fast(quantize(minmax_normalize(img)), CrParams{1, 3, 1});
    const auto loaded = load_raster(stem);
    for (std::size_t i = 0; i < cr.values.size(); ++i)
        CHECK(loaded[0].map.values[i] == double(float(cr.values[i])));
}

TEST_CASE("cli eval reports identity dice") {
    const auto dir = fresh_dir("eval");
    auto mask = make_binary_mask(10, 8);
    for (int i = 0; i < 10; ++i) mask.values[std::size_t(i * 3)] = 1;
    write_file_bytes(dir / "m.pgm", save_mask_pgm(mask));

    const auto r = run_cli("eval --pred " + (dir / "m.pgm").string() + " --gt " +
                               (dir / "m.pgm").string(),
                           dir);
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.out);
    CHECK(out["schema_version"] == 1);
    CHECK(out["n_slices"] == 1);
    CHECK(out["dice"]["mean"] == 1.0);
    CHECK(out["precision"]["mean"] == 1.0);
    CHECK(out["sensitivity"]["mean"] == 1.0);
}

TEST_CASE("cli eval over directories with per-slice csv") {
    const auto dir = fresh_dir("eval_dirs");
    fs::create_directories(dir / "pred");
    fs::create_directories(dir / "gt");

    std::mt19937 rng(55);
    std::vector<double> dices;
    for (int i = 0; i < 4; ++i) {
        const auto p = testsupport::random_mask(9, 9, rng);
        const auto g = testsupport::random_mask(9, 9, rng);
        const std::string name = "slice" + std::to_string(i) + ".pgm";
        write_file_bytes(dir / "pred" / name, save_mask_pgm(p));
        write_file_bytes(dir / "gt" / name, save_mask_pgm(g));
        dices.push_back(dice(confusion(p, g)));
    }
    const auto expected = aggregate(dices);

    const auto csv_path = (dir / "slices.csv").string();
    const auto r = run_cli("eval --pred-dir " + (dir / "pred").string() + " --gt-dir " +
                               (dir / "gt").string() + " --csv " + csv_path,
                           dir);
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.out);
    CHECK(out["n_slices"] == 4);
    CHECK_THAT(out["dice"]["mean"].get<double>(),
               Catch::Matchers::WithinAbs(expected.mean, 1e-12));
    CHECK_THAT(out["dice"]["sd"].get<double>(),
               Catch::Matchers::WithinAbs(expected.sd, 1e-12));

    const auto csv = slurp(csv_path);
    CHECK(csv.rfind("name,dice,precision,sensitivity\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
}

TEST_CASE("cli eval rejects unpaired directory content") {
    const auto dir = fresh_dir("eval_unpaired");
    fs::create_directories(dir / "pred");
    fs::create_directories(dir / "gt");
    const auto mask = make_binary_mask(4, 4, 0);
    write_file_bytes(dir / "pred" / "a.pgm", save_mask_pgm(mask));
    write_file_bytes(dir / "pred" / "b.pgm", save_mask_pgm(mask));
    write_file_bytes(dir / "gt" / "a.pgm", save_mask_pgm(mask));

    const auto r = run_cli("eval --pred-dir " + (dir / "pred").string() + " --gt-dir " +
                               (dir / "gt").string(),
                           dir);
    CHECK(r.exit_code == 3);
    const auto err = json::parse(r.err);
    CHECK(err["error"]["kind"] == "config");
    CHECK(err["error"]["message"].get<std::string>().find("unpaired") != std::string::npos);
}

TEST_CASE("cli curve prints the sdd value") {
    const auto dir = fresh_dir("curve");
    {
        std::ofstream csv(dir / "curve.csv");
        csv << "score\n0.0\n0.4\n0.2\n0.6\n";
    }
    const auto r = run_cli("curve --in " + (dir / "curve.csv").string(), dir);
    REQUIRE(r.exit_code == 0);
    CHECK(r.out == "0.282843\n");
}

TEST_CASE("cli stats matches the library result") {
    const auto dir = fresh_dir("stats");
    {
        std::ofstream csv(dir / "paired.csv");
        csv << "baseline,treatment\n";
        csv << "0.60,0.68\n0.62,0.70\n0.58,0.66\n0.61,0.70\n0.59,0.64\n";
    }
    const auto r = run_cli("stats --in " + (dir / "paired.csv").string() + " --comparisons 3",
                           dir);
    REQUIRE(r.exit_code == 0);
    const auto out = json::parse(r.out);

    PairedSamples s;
    s.pairs = {{0.60, 0.68}, {0.62, 0.70}, {0.58, 0.66}, {0.61, 0.70}, {0.59, 0.64}};
    const auto expected = wilcoxon_signed_rank(s);
    CHECK(out["n"] == expected.n);
    CHECK(out["w"] == expected.w);
    CHECK(out["p_raw"] == expected.p);
    CHECK(out["p_adjusted"] == std::min(1.0, expected.p * 3));
    CHECK(out["exact"] == true);
}

TEST_CASE("cli phantom is byte-for-byte reproducible") {
    const auto dir = fresh_dir("phantom");
    {
        std::ofstream spec(dir / "spec.json");
        spec << R"({"width": 48, "height": 48, "seed": 9,
                    "background": {"mean": 100, "noise_sd": 8}, "gradient": 5,
                    "lesions": [{"center": [24, 24], "semi_axes": [9, 6],
                                 "angle_deg": 15, "boost": 55}]})";
    }
    const auto run_one = [&](const std::string& stem) {
        const auto r = run_cli("phantom --spec " + (dir / "spec.json").string() + " --out " +
                                   (dir / stem).string(),
                               dir);
        REQUIRE(r.exit_code == 0);
    };
    run_one("a");
    run_one("b");
    CHECK(read_file_bytes(dir / "a_image.pgm") == read_file_bytes(dir / "b_image.pgm"));
    CHECK(read_file_bytes(dir / "a_mask.pgm") == read_file_bytes(dir / "b_mask.pgm"));

    // --seed overrides the spec
    const auto r = run_cli("phantom --spec " + (dir / "spec.json").string() +
                               " --seed 10 --out " + (dir / "c").string(),
                           dir);
    REQUIRE(r.exit_code == 0);
    CHECK(read_file_bytes(dir / "a_image.pgm") != read_file_bytes(dir / "c_image.pgm"));
}

TEST_CASE("RADIOMAP_THREADS caps resolved parallelism") {
    setenv("RADIOMAP_THREADS", "1", 1);
    CHECK(resolve_thread_count(8) == 1);
    CHECK(resolve_thread_count(0) == 1);
    setenv("RADIOMAP_THREADS", "0", 1); // ignored: not a valid cap
    CHECK(resolve_thread_count(3) == 3);
    unsetenv("RADIOMAP_THREADS");
    CHECK(resolve_thread_count(3) == 3);
}

TEST_CASE("cli feature output is independent of the thread count") {
    const auto dir = fresh_dir("threads");
    const auto img = small_slice();
    write_file_bytes(dir / "slice.pgm", save_pgm(img, 255));

    const auto run_with = [&](const std::string& stem, const std::string& extra) {
        const auto r = run_cli("features --in " + (dir / "slice.pgm").string() +
                                   " --cr --re --out " + (dir / stem).string() + extra,
                               dir);
        REQUIRE(r.exit_code == 0);
    };
    run_with("serial", " --threads 1");
    run_with("parallel", " --threads 4");
    CHECK(read_file_bytes(dir / "serial.bin") == read_file_bytes(dir / "parallel.bin"));
}

TEST_CASE("cli error paths use distinct exit codes") {
    const auto dir = fresh_dir("errors");

    SECTION("unknown subcommand is a usage error") {
        const auto r = run_cli("frobnicate", dir);
        CHECK(r.exit_code == 2);
        CHECK(json::parse(r.err)["error"]["exit_code"] == 2);
    }
    SECTION("missing input file is an io error") {
        const auto r = run_cli("curve --in " + (dir / "nope.csv").string(), dir);
        CHECK(r.exit_code == 4);
        CHECK(json::parse(r.err)["error"]["kind"] == "io");
    }
    SECTION("invalid parameters are a config error") {
        const auto img = small_slice();
        write_file_bytes(dir / "slice.pgm", save_pgm(img, 255));
        const auto r = run_cli("features --in " + (dir / "slice.pgm").string() +
                                   " --cr --num 0 --out " + (dir / "x").string(),
                               dir);
        CHECK(r.exit_code == 3);
        CHECK(json::parse(r.err)["error"]["kind"] == "config");
    }
    SECTION("malformed input file is a parse error") {
        {
            std::ofstream bad(dir / "bad.pgm", std::ios::binary);
            bad << "P2 2 2 255 junk";
        }
        const auto r = run_cli("features --in " + (dir / "bad.pgm").string() + " --cr --out " +
                                   (dir / "x").string(),
                               dir);
        CHECK(r.exit_code == 4);
        CHECK(json::parse(r.err)["error"]["kind"] == "parse");
    }
}
