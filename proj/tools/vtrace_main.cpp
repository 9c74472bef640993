#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vtrace/actions.hpp"
#include "vtrace/annotate.hpp"
#include "vtrace/bench.hpp"
#include "vtrace/error.hpp"
#include "vtrace/oracle.hpp"
#include "vtrace/parallel.hpp"
#include "vtrace/png_io.hpp"
#include "vtrace/promptio.hpp"
#include "vtrace/rng.hpp"
#include "vtrace/stream.hpp"
#include "vtrace/tracker.hpp"

namespace fs = std::filesystem;
using namespace vtrace;

namespace {

// Everything the subcommands can configure. A --config JSON file overrides
// whatever the flags said, key by key.
struct Options {
  std::string data;
  std::string out;
  std::string frames;
  std::string episode;
  std::string bins_file;
  int k = 40;
  int m = 5;
  int n = 6;
  double kappa = 2.0;
  double dropout = 0.1;
  std::uint64_t seed = 0;
  int redraw_steps = 20;
  int bins = 256;
  int t = -1;
  int search_radius = 5;
  double tolerance = 1.0;
  int threads = 0;
  std::string config;

  TraceConfig trace_config() const {
    TraceConfig cfg;
    cfg.grid_size = k;
    cfg.sample_count = m;
    cfg.window = n;
    cfg.kappa = kappa;
    cfg.dropout_prob = dropout;
    cfg.redraw_steps = redraw_steps;
    cfg.seed = seed;
    return cfg;
  }
};

void apply_config_file(Options& opt) {
  if (opt.config.empty()) return;
  std::ifstream in(opt.config, std::ios::binary);
  if (!in) throw io_error("cannot open config " + opt.config);
  std::stringstream buf;
  buf << in.rdbuf();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw validation_error("invalid config " + opt.config + ": " + e.what());
  }
  if (!j.is_object()) throw validation_error("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "data") opt.data = value.get<std::string>();
      else if (key == "out") opt.out = value.get<std::string>();
      else if (key == "frames") opt.frames = value.get<std::string>();
      else if (key == "episode") opt.episode = value.get<std::string>();
      else if (key == "bins_file") opt.bins_file = value.get<std::string>();
      else if (key == "k") opt.k = value.get<int>();
      else if (key == "m") opt.m = value.get<int>();
      else if (key == "n") opt.n = value.get<int>();
      else if (key == "kappa") opt.kappa = value.get<double>();
      else if (key == "dropout") opt.dropout = value.get<double>();
      else if (key == "seed") opt.seed = value.get<std::uint64_t>();
      else if (key == "redraw_steps") opt.redraw_steps = value.get<int>();
      else if (key == "bins") opt.bins = value.get<int>();
      else if (key == "t") opt.t = value.get<int>();
      else if (key == "search_radius") opt.search_radius = value.get<int>();
      else if (key == "tolerance") opt.tolerance = value.get<double>();
      else if (key == "threads") opt.threads = value.get<int>();
      else throw validation_error("unknown config key \"" + key + "\"");
    } catch (const nlohmann::json::exception& e) {
      throw validation_error("config key \"" + key + "\": " + e.what());
    }
  }
}

void finish_options(Options& opt) {
  apply_config_file(opt);
  if (opt.threads > 0) set_worker_threads(opt.threads);
}

std::optional<BinTable> maybe_load_bins(const Options& opt) {
  if (opt.bins_file.empty()) return std::nullopt;
  return load_bin_table(opt.bins_file);
}

int run_annotate(Options& opt) {
  finish_options(opt);
  const TraceConfig trace_cfg = opt.trace_config();
  if (auto msg = trace_cfg.check(); !msg.empty()) throw validation_error(msg);
  const TrackerConfig tracker_cfg;
  const OverlayStyle style;
  const PromptTemplates templates;
  const auto bins = maybe_load_bins(opt);

  const auto dirs = discover_episodes(opt.data);
  if (dirs.empty()) throw io_error("no episodes under " + opt.data);
  fs::create_directories(opt.out);

  Manifest manifest;
  manifest.config_hash = config_hash_hex(config_snapshot_json(
      trace_cfg, tracker_cfg, style, bins ? bins->n_bins : opt.bins));

  int failures = 0;
  for (const auto& dir : dirs) {
    try {
      AnnotatedEpisode annotated;
      annotated.episode = load_episode(dir);
      annotated.source_dir = dir;
      auto result = annotate_episode(annotated.episode, trace_cfg, tracker_cfg, style);
      annotated.steps = apply_dropout(
          std::move(result.steps), trace_cfg.dropout_prob,
          derive_seed(trace_cfg.seed, fnv1a64(annotated.episode.id)));
      write_episode_outputs(annotated, opt.out, trace_cfg, tracker_cfg, style,
                            templates, bins ? &*bins : nullptr);
      manifest.episodes.push_back(annotated.episode.id);
      std::cout << annotated.episode.id << ": " << annotated.steps.size()
                << " steps, " << result.dense_calls << " dense tracks\n";
    } catch (const Error& e) {
      ++failures;
      std::cerr << dir << ": " << e.what() << "\n";
    }
  }
  std::sort(manifest.episodes.begin(), manifest.episodes.end());
  write_manifest(opt.out, manifest);
  std::cout << "annotated " << manifest.episodes.size() << "/" << dirs.size()
            << " episodes -> " << opt.out << "\n";
  return failures == 0 ? 0 : 1;
}

int run_stream(Options& opt) {
  finish_options(opt);
  const TraceConfig trace_cfg = opt.trace_config();
  if (auto msg = trace_cfg.check(); !msg.empty()) throw validation_error(msg);

  std::vector<std::string> frame_paths;
  for (int i = 0;; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05d.png", i);
    const fs::path p = fs::path(opt.frames) / name;
    if (!fs::exists(p)) break;
    frame_paths.push_back(p.string());
  }
  if (frame_paths.empty()) throw io_error("no frame_%05d.png files under " + opt.frames);

  fs::create_directories(opt.out);
  StreamState state(trace_cfg, TrackerConfig{});
  std::ofstream log(fs::path(opt.out) / "stream.jsonl", std::ios::binary);
  if (!log) throw io_error("cannot open stream.jsonl for writing");

  for (std::size_t i = 0; i < frame_paths.size(); ++i) {
    const Frame frame = read_png(frame_paths[i], static_cast<int>(i));
    const StreamResult result = state.step(frame);
    nlohmann::ordered_json j;
    j["t"] = static_cast<int>(i);
    j["trace_present"] = result.trace.has_value();
    if (result.trace) {
      j["window"] = {result.trace->window_start, result.trace->window_end};
      auto traces = nlohmann::ordered_json::array();
      for (const auto& tr : result.trace->traces) {
        auto points = nlohmann::ordered_json::array();
        for (const auto& p : tr.points) {
          points.push_back({std::round(p.x * 1000.0) / 1000.0,
                            std::round(p.y * 1000.0) / 1000.0});
        }
        traces.push_back({{"origin", tr.origin}, {"points", points}});
      }
      j["traces"] = traces;
      char name[32];
      std::snprintf(name, sizeof(name), "overlay_%05d.png", static_cast<int>(i));
      write_png((fs::path(opt.out) / name).string(), *result.overlaid);
    }
    log << j.dump() << "\n";
  }
  std::cout << "streamed " << frame_paths.size() << " frames, "
            << state.dense_calls() << " dense recalibrations -> " << opt.out
            << "\n";
  return 0;
}

int run_fit_actions(Options& opt) {
  finish_options(opt);
  const auto dirs = discover_episodes(opt.data);
  if (dirs.empty()) throw io_error("no episodes under " + opt.data);

  std::vector<std::vector<double>> actions;
  for (const auto& dir : dirs) {
    auto meta = load_episode_meta(dir);
    for (auto& a : meta.actions) actions.push_back(std::move(a));
  }
  const BinTable table = fit_bins_actions(actions, opt.bins);
  save_bin_table(opt.out, table);
  std::cout << "fit " << table.dims << " dimensions x " << table.n_bins
            << " bins from " << actions.size() << " actions -> " << opt.out
            << "\n";
  return 0;
}

int run_render(Options& opt) {
  finish_options(opt);
  const TraceConfig trace_cfg = opt.trace_config();
  if (auto msg = trace_cfg.check(); !msg.empty()) throw validation_error(msg);
  const Episode episode = load_episode(opt.episode);
  if (opt.t < 0 || opt.t >= episode.length()) {
    throw validation_error("timestep out of range");
  }
  if (opt.t < trace_cfg.window) {
    throw validation_error("timestep " + std::to_string(opt.t) +
                           " has fewer than " +
                           std::to_string(trace_cfg.window) +
                           " frames of history");
  }
  const auto result =
      annotate_episode(episode, trace_cfg, TrackerConfig{}, OverlayStyle{});
  const auto& step = result.steps[static_cast<std::size_t>(opt.t)];
  write_png(opt.out, *step.overlaid);
  const int traced = step.trace ? static_cast<int>(step.trace->traces.size()) : 0;
  std::cout << "rendered t=" << opt.t << " with " << traced << " traces -> "
            << opt.out << "\n";
  return 0;
}

int run_verify(Options& opt) {
  finish_options(opt);
  if (opt.search_radius < 1) throw validation_error("search radius must be positive");
  const Episode episode = load_episode(opt.episode);
  if (episode.length() < 2) throw validation_error("episode must have at least 2 frames");

  const TrackerConfig tracker_cfg;
  const int margin =
      (tracker_cfg.window_half + 1) * (1 << tracker_cfg.pyramid_levels);
  const Frame& first = episode.frames.front();

  std::vector<Vec2> queries;
  for (const Vec2 q : grid_queries(first.width, first.height, 10)) {
    const int oracle_margin = opt.search_radius + tracker_cfg.window_half + 1;
    if (q.x >= std::max(margin, oracle_margin) &&
        q.x <= first.width - 1 - std::max(margin, oracle_margin) &&
        q.y >= std::max(margin, oracle_margin) &&
        q.y <= first.height - 1 - std::max(margin, oracle_margin)) {
      queries.push_back({std::round(q.x), std::round(q.y)});
    }
  }
  if (queries.empty()) throw validation_error("frames too small for verification");

  double max_dev = 0.0;
  double sum_dev = 0.0;
  std::size_t count = 0;
  for (int t = 0; t + 1 < episode.length(); ++t) {
    const auto prev = build_pyramid(episode.frames[static_cast<std::size_t>(t)],
                                    tracker_cfg);
    const auto next = build_pyramid(
        episode.frames[static_cast<std::size_t>(t) + 1], tracker_cfg);
    for (const Vec2 q : queries) {
      const TrackResult lk = track_point(prev, next, q, tracker_cfg);
      if (lk.status != TrackStatus::tracked) continue;
      const Vec2 oracle = oracle_track_point(
          episode.frames[static_cast<std::size_t>(t)],
          episode.frames[static_cast<std::size_t>(t) + 1],
          {static_cast<int>(q.x), static_cast<int>(q.y)}, opt.search_radius,
          tracker_cfg.window_half);
      const double dev = std::hypot(lk.position.x - oracle.x,
                                    lk.position.y - oracle.y);
      max_dev = std::max(max_dev, dev);
      sum_dev += dev;
      ++count;
    }
  }
  if (count == 0) throw validation_error("no trackable points survived");
  std::printf("verified %zu point tracks: max deviation %.4f px, mean %.4f px (tolerance %.2f px)\n",
              count, max_dev, sum_dev / static_cast<double>(count), opt.tolerance);
  return max_dev <= opt.tolerance ? 0 : 1;
}

int run_bench(Options& opt) {
  finish_options(opt);
  const BenchReport report = run_benchmark();
  std::cout << format_bench_report(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"visual trace extraction pipeline"};
  app.require_subcommand(1);
  Options opt;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--threads", opt.threads, "worker thread count");
    cmd->add_option("--config", opt.config, "JSON file overriding flags");
  };
  const auto add_trace_flags = [&](CLI::App* cmd) {
    cmd->add_option("--k", opt.k, "tracking grid size");
    cmd->add_option("--m", opt.m, "traces sampled per prompt");
    cmd->add_option("--n", opt.n, "history window length");
    cmd->add_option("--kappa", opt.kappa, "movement threshold, pixels");
    cmd->add_option("--seed", opt.seed, "RNG seed");
  };

  auto* annotate = app.add_subcommand("annotate", "batch-annotate a dataset");
  annotate->add_option("--data", opt.data, "dataset directory")->required();
  annotate->add_option("--out", opt.out, "output directory")->required();
  add_trace_flags(annotate);
  annotate->add_option("--dropout", opt.dropout, "trace dropout probability");
  annotate->add_option("--bins-file", opt.bins_file,
                       "bin table JSON for action tokens");
  add_common(annotate);

  auto* stream = app.add_subcommand("stream", "run the streaming tracker");
  stream->add_option("--frames", opt.frames, "frame directory")->required();
  stream->add_option("--out", opt.out, "output directory")->required();
  stream->add_option("--redraw-steps", opt.redraw_steps,
                     "steps between dense recalibrations");
  add_trace_flags(stream);
  add_common(stream);

  auto* fit = app.add_subcommand("fit-actions", "fit action bins");
  fit->add_option("--data", opt.data, "dataset directory")->required();
  fit->add_option("--out", opt.out, "output bin table path")->required();
  fit->add_option("--bins", opt.bins, "bin count");
  add_common(fit);

  auto* render = app.add_subcommand("render", "render one overlay");
  render->add_option("--episode", opt.episode, "episode directory")->required();
  render->add_option("--t", opt.t, "timestep")->required();
  render->add_option("--out", opt.out, "output PNG path")->required();
  add_trace_flags(render);
  add_common(render);

  auto* verify = app.add_subcommand("verify", "check tracking against the block-matching oracle");
  verify->add_option("--episode", opt.episode, "episode directory")->required();
  verify->add_option("--search-radius", opt.search_radius, "oracle search radius");
  verify->add_option("--tolerance", opt.tolerance, "max allowed deviation, pixels");
  add_common(verify);

  auto* bench = app.add_subcommand("bench", "measure the performance budget");
  add_common(bench);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (annotate->parsed()) return run_annotate(opt);
    if (stream->parsed()) return run_stream(opt);
    if (fit->parsed()) return run_fit_actions(opt);
    if (render->parsed()) return run_render(opt);
    if (verify->parsed()) return run_verify(opt);
    if (bench->parsed()) return run_bench(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == Error::Kind::validation ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
