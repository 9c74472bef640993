#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "helpers.hpp"
#include "vtrace/actions.hpp"
#include "vtrace/png_io.hpp"
#include "vtrace/promptio.hpp"

using namespace vtrace;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;
};

// Runs the installed binary with stderr folded into stdout.
RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(VTRACE_BIN) + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) {
    result.output.append(buf, got);
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

// Dataset with two 128x128 translating episodes (dense pyramids need a wide
// interior margin).
void write_dataset(const std::string& dir) {
  save_episode((fs::path(dir) / "ep_a").string(),
               vtest::make_episode(128, 128, 10, 1, 0, 61, "ep_a"));
  save_episode((fs::path(dir) / "ep_b").string(),
               vtest::make_episode(128, 128, 10, 0, 1, 62, "ep_b"));
}

}  // namespace

TEST_CASE("help and argument errors") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("annotate --help").exit_code == 0);
  CHECK(run_cli("").exit_code == 1);                    // subcommand required
  CHECK(run_cli("annotate").exit_code == 1);            // missing --data/--out
  CHECK(run_cli("no-such-command").exit_code == 1);
}

TEST_CASE("annotate writes a complete output tree") {
  vtest::TempDir dir("cli_annotate");
  write_dataset(dir.sub("data"));

  const auto run = run_cli("annotate --data " + dir.sub("data") + " --out " +
                           dir.sub("out") + " --seed 5 --threads 1");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("annotated 2/2 episodes") != std::string::npos);

  const Manifest manifest = read_manifest(dir.sub("out"));
  CHECK(manifest.episodes == std::vector<std::string>{"ep_a", "ep_b"});

  for (const char* id : {"ep_a", "ep_b"}) {
    const auto records =
        read_prompt_records(dir.sub(std::string("out/") + id + "/records.jsonl"));
    REQUIRE(records.size() == 10);
    int traced = 0;
    for (const auto& r : records) traced += r.trace_present ? 1 : 0;
    CHECK(traced >= 1);  // dropout may hide some, never all four traced steps
    CHECK(fs::exists(dir.sub(std::string("out/") + id + "/traces.json")));
  }

  // A second run with the same seed reproduces the records byte for byte.
  const auto rerun = run_cli("annotate --data " + dir.sub("data") + " --out " +
                             dir.sub("out2") + " --seed 5 --threads 1");
  CHECK(rerun.exit_code == 0);
  CHECK(vtest::slurp(dir.sub("out/ep_a/records.jsonl")) ==
        vtest::slurp(dir.sub("out2/ep_a/records.jsonl")));
}

TEST_CASE("annotate attaches tokens from a fitted bin table") {
  vtest::TempDir dir("cli_bins");
  // Action fitting needs at least 256 samples per dimension; frames are not
  // read, so keep them small.
  save_episode(dir.sub("data/long_a"), vtest::make_episode(32, 32, 150, 0, 0, 63));
  save_episode(dir.sub("data/long_b"), vtest::make_episode(32, 32, 150, 0, 0, 64));

  const auto fit = run_cli("fit-actions --data " + dir.sub("data") + " --out " +
                           dir.sub("bins.json"));
  CHECK(fit.exit_code == 0);
  CHECK(fit.output.find("fit 4 dimensions x 256 bins from 300 actions") !=
        std::string::npos);
  const BinTable table = load_bin_table(dir.sub("bins.json"));
  CHECK(table.dims == 4);

  write_dataset(dir.sub("frames"));
  const auto annotate = run_cli("annotate --data " + dir.sub("frames") +
                                " --out " + dir.sub("out") + " --bins-file " +
                                dir.sub("bins.json"));
  CHECK(annotate.exit_code == 0);
  const auto records = read_prompt_records(dir.sub("out/ep_a/records.jsonl"));
  REQUIRE(!records.empty());
  for (const auto& r : records) {
    REQUIRE(r.action_tokens.has_value());
    CHECK(r.action_tokens->size() == 4);
  }
}

TEST_CASE("annotate failure modes") {
  vtest::TempDir dir("cli_fail");
  write_dataset(dir.sub("data"));

  CHECK(run_cli("annotate --data " + dir.sub("nowhere") + " --out " +
                dir.sub("out"))
            .exit_code == 2);

  const auto bad = run_cli("annotate --data " + dir.sub("data") + " --out " +
                           dir.sub("out") + " --kappa -5");
  CHECK(bad.exit_code == 1);
  CHECK(bad.output.find("kappa") != std::string::npos);

  CHECK(run_cli("annotate --data " + dir.sub("data") + " --out " +
                dir.sub("out") + " --m 0")
            .exit_code == 1);
}

TEST_CASE("a config file overrides conflicting flags") {
  vtest::TempDir dir("cli_config");
  write_dataset(dir.sub("data"));

  std::ofstream(dir.sub("config.json")) << R"({"kappa": 2.0, "seed": 9})";
  const auto run = run_cli("annotate --data " + dir.sub("data") + " --out " +
                           dir.sub("out") + " --kappa -1 --config " +
                           dir.sub("config.json"));
  CHECK(run.exit_code == 0);  // the flag value alone would be rejected

  std::ofstream(dir.sub("bad.json")) << R"({"zebra": 1})";
  const auto unknown = run_cli("annotate --data " + dir.sub("data") +
                               " --out " + dir.sub("out2") + " --config " +
                               dir.sub("bad.json"));
  CHECK(unknown.exit_code == 1);
  CHECK(unknown.output.find("unknown config key") != std::string::npos);

  CHECK(run_cli("annotate --data " + dir.sub("data") + " --out " +
                dir.sub("out3") + " --config " + dir.sub("missing.json"))
            .exit_code == 2);
}

TEST_CASE("render produces a single overlay PNG") {
  vtest::TempDir dir("cli_render");
  save_episode(dir.sub("ep"), vtest::make_episode(128, 128, 10, 1, 0, 65));

  const auto run = run_cli("render --episode " + dir.sub("ep") + " --t 7 --out " +
                           dir.sub("t7.png"));
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("rendered t=7") != std::string::npos);
  const Frame out = read_png(dir.sub("t7.png"));
  CHECK(out.width == 128);
  CHECK(out.height == 128);

  CHECK(run_cli("render --episode " + dir.sub("ep") + " --t 3 --out " +
                dir.sub("t3.png"))
            .exit_code == 1);
  CHECK(run_cli("render --episode " + dir.sub("ep") + " --t 99 --out " +
                dir.sub("t99.png"))
            .exit_code == 1);
}

TEST_CASE("stream writes a jsonl log and overlays") {
  vtest::TempDir dir("cli_stream");
  const auto frames = make_translating_sequence(128, 128, 16, 1, 1, 66);
  fs::create_directories(dir.sub("frames"));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05zu.png", i);
    write_png(dir.sub(std::string("frames/") + name), frames[i]);
  }

  const auto run = run_cli("stream --frames " + dir.sub("frames") + " --out " +
                           dir.sub("out") + " --redraw-steps 5 --seed 3");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("streamed 16 frames") != std::string::npos);
  CHECK(run.output.find("2 dense recalibrations") != std::string::npos);

  std::ifstream log(dir.sub("out/stream.jsonl"));
  REQUIRE(log.good());
  std::string line;
  int lines = 0;
  int present = 0;
  while (std::getline(log, line)) {
    if (line.empty()) continue;
    ++lines;
    if (line.find("\"trace_present\":true") != std::string::npos) ++present;
    if (lines <= 6) CHECK(line.find("\"trace_present\":false") != std::string::npos);
  }
  CHECK(lines == 16);
  CHECK(present > 0);
  CHECK(fs::exists(dir.sub("out/overlay_00006.png")));

  CHECK(run_cli("stream --frames " + dir.sub("empty") + " --out " +
                dir.sub("out2"))
            .exit_code == 2);
}

TEST_CASE("verify agrees with the block-matching oracle on clean motion") {
  vtest::TempDir dir("cli_verify");
  save_episode(dir.sub("ep"), vtest::make_episode(160, 160, 6, 1, 0, 67));

  const auto run = run_cli("verify --episode " + dir.sub("ep"));
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("max deviation") != std::string::npos);

  const auto strict = run_cli("verify --episode " + dir.sub("ep") +
                              " --tolerance -1");
  CHECK(strict.exit_code == 1);
}

TEST_CASE("bench prints its report") {
  const auto run = run_cli("bench");
  CHECK(run.exit_code == 0);
  CHECK(run.output.find("sparse stream step") != std::string::npos);
  CHECK(run.output.find("dense serial reference") != std::string::npos);
}