// End-to-end checks that drive the built binary through a shell, covering the
// batch contracts: determinism, partial-failure exit codes, manifests, and
// the inspection subcommands.
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "relight/codec.hpp"

namespace fs = std::filesystem;
using namespace relight;

#ifndef RELIGHT_CLI_PATH
#error "RELIGHT_CLI_PATH must point at the built binary"
#endif

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("relight_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RELIGHT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::uint8_t> slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

std::string slurp_text(const fs::path& p) {
    const auto bytes = slurp(p);
    return std::string(bytes.begin(), bytes.end());
}

void write_scene(const fs::path& p, std::uint64_t seed, int w = 24, int h = 20) {
    save_png(p.string(), oracles::gamma_corrupt(oracles::smooth_scene(w, h, seed), seed % 2 == 0, seed));
}

const std::string kFastFlags = " --epochs 2 --steps 8 --patch-k 5 --jobs 1 --seed 77 ";

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("enhance is byte-identical across reruns") {
    TempDir in("det_in"), out1("det_out1"), out2("det_out2");
    write_scene(in.path / "scene.png", 4);

    REQUIRE(run_cli("enhance -o " + out1.path.string() + kFastFlags + "--emit-gamma " +
                    in.path.string()) == 0);
    REQUIRE(run_cli("enhance -o " + out2.path.string() + kFastFlags + "--emit-gamma " +
                    in.path.string()) == 0);

    for (const char* name : {"scene_enhanced.png", "scene_trace.csv", "scene_gamma.bin",
                             "run_manifest.txt"}) {
        INFO(name);
        const auto a = slurp(out1.path / name);
        const auto b = slurp(out2.path / name);
        CHECK(a == b);
    }
}

TEST_CASE("rerunning from the manifest reproduces the outputs") {
    TempDir in("man_in"), out1("man_out1"), out2("man_out2");
    write_scene(in.path / "scene.png", 9);

    REQUIRE(run_cli("enhance -o " + out1.path.string() + kFastFlags + in.path.string()) == 0);
    REQUIRE(run_cli("enhance -o " + out2.path.string() + " --config " +
                    (out1.path / "run_manifest.txt").string() + " " + in.path.string()) == 0);
    CHECK(slurp(out1.path / "scene_enhanced.png") == slurp(out2.path / "scene_enhanced.png"));
    CHECK(slurp(out1.path / "scene_trace.csv") == slurp(out2.path / "scene_trace.csv"));
}

TEST_CASE("empty input directory is an invocation error with no artifacts") {
    TempDir in("empty_in"), out("empty_out");
    CHECK(run_cli("enhance -o " + out.path.string() + kFastFlags + in.path.string()) == 2);
    CHECK_FALSE(fs::exists(out.path / "run_manifest.txt"));
}

TEST_CASE("a corrupt file among valid ones yields partial failure") {
    TempDir in("corrupt_in"), out("corrupt_out");
    write_scene(in.path / "a.png", 1);
    write_scene(in.path / "b.png", 2);
    write_scene(in.path / "c.png", 3);
    std::ofstream(in.path / "broken.png") << "this is not a png";

    const std::string cmd = std::string(RELIGHT_CLI_PATH) + " enhance -o " + out.path.string() +
                            kFastFlags + in.path.string() + " >/dev/null 2>" +
                            (out.path / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 1);
    for (const char* name : {"a_enhanced.png", "b_enhanced.png", "c_enhanced.png"}) {
        CHECK(fs::exists(out.path / name));
    }
    CHECK_FALSE(fs::exists(out.path / "broken_enhanced.png"));
    CHECK(slurp_text(out.path / "stderr.txt").find("broken.png") != std::string::npos);
}

TEST_CASE("invalid config key aborts naming the key") {
    TempDir in("cfg_in"), out("cfg_out");
    write_scene(in.path / "scene.png", 5);
    std::ofstream(in.path / "bad.cfg") << "alpha=5\nwibble=3\n";

    const std::string cmd = std::string(RELIGHT_CLI_PATH) + " enhance -o " + out.path.string() +
                            " --config " + (in.path / "bad.cfg").string() + " " +
                            in.path.string() + " >/dev/null 2>" +
                            (out.path / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 2);
    CHECK(slurp_text(out.path / "stderr.txt").find("wibble") != std::string::npos);
}

TEST_CASE("fusing an image with itself returns the image") {
    TempDir in("fuse_in"), out("fuse_out");
    write_scene(in.path / "scene.png", 6);
    REQUIRE(run_cli("fuse -o " + out.path.string() + " --patch-k 5 " +
                    (in.path / "scene.png").string() + " " + (in.path / "scene.png").string()) == 0);
    const ImageF orig = load_image((in.path / "scene.png").string());
    const ImageF fused = load_image((out.path / "scene_fused.png").string());
    REQUIRE(orig.same_size(fused));
    CHECK(orig.data == fused.data);
    CHECK(fs::exists(out.path / "scene_winners.png"));
}

TEST_CASE("fuse rejects mismatched dimensions naming both files") {
    TempDir in("fusedim_in"), out("fusedim_out");
    write_scene(in.path / "a.png", 6, 24, 20);
    write_scene(in.path / "b.png", 7, 20, 24);
    const std::string cmd = std::string(RELIGHT_CLI_PATH) + " fuse -o " + out.path.string() +
                            " --patch-k 5 " + (in.path / "a.png").string() + " " +
                            (in.path / "b.png").string() + " >/dev/null 2>" +
                            (out.path / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 2);
    const std::string err = slurp_text(out.path / "stderr.txt");
    CHECK(err.find("a.png") != std::string::npos);
    CHECK(err.find("b.png") != std::string::npos);
}

TEST_CASE("eval of a directory against itself reports the caps") {
    TempDir in("eval_in"), out("eval_out");
    write_scene(in.path / "x.png", 8);
    write_scene(in.path / "y.png", 9);
    REQUIRE(run_cli("eval -o " + out.path.string() + " " + in.path.string() + " " +
                    in.path.string()) == 0);
    const std::string csv = slurp_text(out.path / "eval.csv");
    CHECK(csv.find("x.png,100.0000,1.000000") != std::string::npos);
    CHECK(csv.find("y.png,100.0000,1.000000") != std::string::npos);
}

TEST_CASE("refs are reproducible for a fixed seed") {
    TempDir in("refs_in"), out1("refs_out1"), out2("refs_out2");
    write_scene(in.path / "scene.png", 10);
    REQUIRE(run_cli("refs -o " + out1.path.string() + " --seed 5 --n-refs 2 " +
                    (in.path / "scene.png").string()) == 0);
    REQUIRE(run_cli("refs -o " + out2.path.string() + " --seed 5 --n-refs 2 " +
                    (in.path / "scene.png").string()) == 0);

    std::vector<fs::path> a, b;
    for (const auto& e : fs::directory_iterator(out1.path)) a.push_back(e.path().filename());
    for (const auto& e : fs::directory_iterator(out2.path)) b.push_back(e.path().filename());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    REQUIRE(a == b);
    CHECK(a.size() == 5);  // 4 refs + manifest
    for (const fs::path& name : a) {
        CHECK(slurp(out1.path / name) == slurp(out2.path / name));
    }
}

TEST_CASE("score dumps four planes and their ranges") {
    TempDir in("score_in"), out("score_out");
    write_scene(in.path / "scene.png", 11);
    REQUIRE(run_cli("score -o " + out.path.string() + " --patch-k 5 " +
                    (in.path / "scene.png").string()) == 0);
    for (const char* name :
         {"scene_E.png", "scene_C.png", "scene_S.png", "scene_score.png", "scene_stats.txt"}) {
        CHECK(fs::exists(out.path / name));
    }
    const std::string stats = slurp_text(out.path / "scene_stats.txt");
    CHECK(stats.find("E min=") != std::string::npos);
    CHECK(stats.find("score min=") != std::string::npos);
}

TEST_SUITE_END();
