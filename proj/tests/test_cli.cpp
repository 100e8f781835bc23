#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "helpers.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = CGVM_CLI;

struct RunResult {
    int exit_code;
    std::string output;
};

/// Runs the CLI with stdout+stderr captured to a file.
RunResult run_cli(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const fs::path out = fs::temp_directory_path() / ("cgvm_cli_out_" +
                                                      std::to_string(counter++) + ".txt");
    const std::string cmd = env + (env.empty() ? "" : " ") + kCli + " " + args + " > " +
                            out.string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(raw);
    r.output = testutil::read_file(out);
    return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

fs::path fresh_run_copy(const std::string& tag) {
    const fs::path runs = testutil::make_temp_dir("cli_" + tag);
    fs::copy(testutil::data_dir() / "runs" / "fixture", runs / "fixture",
             fs::copy_options::recursive);
    return runs;
}

std::string eval_args(const fs::path& runs) {
    return "eval --dataset " + q(testutil::dataset_dir()) + " --run-id fixture --runs-dir " +
           q(runs) + " --offline --side 128 --brisque-model " + q(testutil::model_path()) +
           " --embed-store " + q(testutil::data_dir() / "embeddings.store");
}

}  // namespace

TEST_CASE("validate accepts the fixture corpus and rejects a broken one") {
    CHECK(run_cli("validate --dataset " + q(testutil::dataset_dir())).exit_code == 0);

    const fs::path broken = testutil::make_temp_dir("cli_broken_ds");
    fs::copy(testutil::dataset_dir(), broken, fs::copy_options::recursive);
    fs::remove(broken / "images" / "animal_01.png");
    const RunResult r = run_cli("validate --dataset " + q(broken));
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("animal_01") != std::string::npos);

    CHECK(run_cli("validate --dataset /nonexistent").exit_code == 1);
}

TEST_CASE("stats writes the corpus CSVs") {
    const fs::path out = testutil::make_temp_dir("cli_stats");
    const RunResult r = run_cli("stats --dataset " + q(testutil::dataset_dir()) + " --out " +
                                q(out));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("samples: 12") != std::string::npos);
    for (const char* name :
         {"conversation_lengths.csv", "sources.csv", "element_frequencies.csv"}) {
        CHECK(fs::exists(out / name));
    }
    const std::string lengths = testutil::read_file(out / "conversation_lengths.csv");
    CHECK(lengths.find("all,5,2") != std::string::npos);
}

TEST_CASE("a full offline evaluation succeeds end to end") {
    const fs::path runs = fresh_run_copy("eval_ok");
    const RunResult r = run_cli(eval_args(runs));
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("Scores") != std::string::npos);
    CHECK(r.output.find("ssim") != std::string::npos);
    CHECK(r.output.find("brisque") != std::string::npos);
    CHECK(fs::exists(runs / "fixture" / "report.csv"));
    CHECK(fs::exists(runs / "fixture" / "aggregate.json"));
    CHECK(fs::exists(runs / "fixture" / "plotdata.csv"));

    // re-deriving aggregates from the written report also works
    const RunResult rep = run_cli("report --dataset " + q(testutil::dataset_dir()) +
                                  " --run-id fixture --runs-dir " + q(runs) + " --offline");
    CHECK(rep.exit_code == 0);
    CHECK(rep.output.find("ssim") != std::string::npos);
}

TEST_CASE("unknown metrics and modes are configuration errors") {
    const fs::path runs = fresh_run_copy("eval_badmetric");
    CHECK(run_cli(eval_args(runs) + " --metrics ssim,sharpness").exit_code == 1);
    CHECK(run_cli(eval_args(runs) + " --ssim-window box").exit_code == 1);
    CHECK(run_cli(eval_args(runs) + " --iou-matching random").exit_code == 1);
}

TEST_CASE("offline mode refuses to coexist with remote service urls") {
    const fs::path runs = fresh_run_copy("eval_offline_env");
    const RunResult r = run_cli(eval_args(runs), "CGVM_LLM_URL=http://example.test");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("CGVM_LLM_URL") != std::string::npos);
}

TEST_CASE("requesting clip without any embedding source is a partial failure") {
    const fs::path runs = fresh_run_copy("eval_noembed");
    const std::string args = "eval --dataset " + q(testutil::dataset_dir()) +
                             " --run-id fixture --runs-dir " + q(runs) +
                             " --offline --side 128 --metrics clip";
    const RunResult r = run_cli(args);
    CHECK(r.exit_code == 2);
    const std::string errors = testutil::read_file(runs / "fixture" / "errors.json");
    CHECK(errors.find("embedding") != std::string::npos);
}

TEST_CASE("missing run artifacts make the evaluation partial, not silent") {
    const fs::path runs = fresh_run_copy("eval_missing");
    fs::remove(runs / "fixture" / "human_01" / "hop_2.png");
    const RunResult r = run_cli(eval_args(runs));
    CHECK(r.exit_code == 2);
    const std::string errors = testutil::read_file(runs / "fixture" / "errors.json");
    CHECK(errors.find("human_01") != std::string::npos);
}
