#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vtrace/actions.hpp"
#include "vtrace/annotate.hpp"
#include "vtrace/core.hpp"

namespace vtrace {

// Free text around the two prompt images. "{instruction}" is substituted.
struct PromptTemplates {
  std::string traced =
      "You are given two images: the current observation and the same "
      "observation overlaid with the visual trace of the robot end effector. "
      "What action should the robot take to {instruction}?";
  std::string plain = "What action should the robot take to {instruction}?";
  std::string separator = "<sep>";
};

// One assembled model input. When the trace is absent, empty, or dropped,
// the prompt image reference falls back to the original image and the text
// omits the trace hint.
struct PromptRecord {
  std::string episode_id;
  int timestep = 0;
  std::string original_image;
  std::string prompt_image;
  std::string separator;
  std::string instruction;
  std::string prompt_text;
  bool trace_present = false;
  std::optional<std::vector<int>> action_tokens;
};

std::string render_template(const std::string& tpl, const std::string& instruction);

PromptRecord build_prompt_record(const StepAnnotation& step,
                                 const Episode& episode,
                                 const std::string& original_ref,
                                 const std::string& overlaid_ref,
                                 const PromptTemplates& templates = {},
                                 const BinTable* bins = nullptr);

// One line per trace: "point {i}: (x0, y0) -> (x1, y1) -> ...", coordinates
// rounded to `precision` decimal places (0 = integers). Empty set -> "".
std::string format_text_trace(const TraceSet& traces, int precision = 0);

// Dataset I/O. An episode directory holds frame_%05d.png (8-bit RGB) and
// episode.json {"instruction": str, "actions": [[...]...]}.
Episode load_episode(const std::string& dir);
void save_episode(const std::string& dir, const Episode& episode);

// Metadata without the frames, for action fitting over large datasets.
struct EpisodeMeta {
  std::string instruction;
  std::vector<std::vector<double>> actions;
};
EpisodeMeta load_episode_meta(const std::string& dir);

// Episode directories under data_dir (any subdirectory holding an
// episode.json; data_dir itself if it holds one), sorted by name.
std::vector<std::string> discover_episodes(const std::string& data_dir);

// Canonical config snapshot (stable key order, 17-digit floats) and its
// fnv1a64 hash as 16 hex digits.
std::string config_snapshot_json(const TraceConfig& trace_cfg,
                                 const TrackerConfig& tracker_cfg,
                                 const OverlayStyle& style, int n_bins = 256);
std::string config_hash_hex(const std::string& snapshot_json);

struct AnnotatedEpisode {
  Episode episode;
  std::vector<StepAnnotation> steps;
  std::string source_dir;  // where the original frames live; used in records
};

struct Manifest {
  std::string config_hash;
  std::vector<std::string> episodes;
};

// Writes one episode's outputs under out_dir/<episode id>/: overlay_%05d.png
// per overlaid step, traces.json (coordinates at 3 decimals, kappa, seed,
// config snapshot), and records.jsonl with one prompt record per line.
// Byte-identical across reruns on identical input.
void write_episode_outputs(const AnnotatedEpisode& annotated,
                           const std::string& out_dir,
                           const TraceConfig& trace_cfg,
                           const TrackerConfig& tracker_cfg,
                           const OverlayStyle& style,
                           const PromptTemplates& templates = {},
                           const BinTable* bins = nullptr);

void write_manifest(const std::string& out_dir, const Manifest& manifest);
Manifest read_manifest(const std::string& out_dir);

Manifest write_annotated_dataset(std::span<const AnnotatedEpisode> episodes,
                                 const std::string& out_dir,
                                 const TraceConfig& trace_cfg,
                                 const TrackerConfig& tracker_cfg,
                                 const OverlayStyle& style,
                                 const PromptTemplates& templates = {},
                                 const BinTable* bins = nullptr);

// Parses records.jsonl and re-checks the record invariants.
std::vector<PromptRecord> read_prompt_records(const std::string& path);

}  // namespace vtrace
