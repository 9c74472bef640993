#include "vtrace/promptio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vtrace/error.hpp"
#include "vtrace/png_io.hpp"
#include "vtrace/rng.hpp"

namespace fs = std::filesystem;

namespace vtrace {

std::string render_template(const std::string& tpl, const std::string& instruction) {
  static constexpr std::string_view kSlot = "{instruction}";
  std::string out = tpl;
  for (std::size_t pos = out.find(kSlot); pos != std::string::npos;
       pos = out.find(kSlot, pos)) {
    out.replace(pos, kSlot.size(), instruction);
    pos += instruction.size();
  }
  return out;
}

PromptRecord build_prompt_record(const StepAnnotation& step,
                                 const Episode& episode,
                                 const std::string& original_ref,
                                 const std::string& overlaid_ref,
                                 const PromptTemplates& templates,
                                 const BinTable* bins) {
  const bool effective =
      step.trace.has_value() && !step.trace->empty() && !step.dropped;

  PromptRecord record;
  record.episode_id = episode.id;
  record.timestep = step.timestep;
  record.original_image = original_ref;
  record.prompt_image = effective ? overlaid_ref : original_ref;
  record.separator = templates.separator;
  record.instruction = episode.instruction;
  record.prompt_text = render_template(
      effective ? templates.traced : templates.plain, episode.instruction);
  record.trace_present = effective;
  if (bins) {
    const auto& actions = episode.actions;
    const std::size_t t = static_cast<std::size_t>(step.timestep);
    if (t >= actions.size()) throw validation_error("timestep has no action");
    record.action_tokens = encode_action(actions[t], *bins);
  }
  return record;
}

namespace {

std::string format_coord(double v, int precision) {
  char buf[48];
  if (precision <= 0) {
    std::snprintf(buf, sizeof(buf), "%ld", std::lround(v));
  } else {
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  }
  return buf;
}

}  // namespace

std::string format_text_trace(const TraceSet& traces, int precision) {
  std::string out;
  for (std::size_t i = 0; i < traces.traces.size(); ++i) {
    out += "point " + std::to_string(i) + ":";
    const auto& pts = traces.traces[i].points;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      out += j == 0 ? " " : " -> ";
      out += "(" + format_coord(pts[j].x, precision) + ", " +
             format_coord(pts[j].y, precision) + ")";
    }
    out += "\n";
  }
  return out;
}

namespace {

std::string frame_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05d.png", index);
  return buf;
}

std::string overlay_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "overlay_%05d.png", index);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string f3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw io_error("failed to write " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

EpisodeMeta load_episode_meta(const std::string& dir) {
  const fs::path meta = fs::path(dir) / "episode.json";
  if (!fs::exists(meta)) throw io_error("missing metadata: " + meta.string());

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(meta.string()));
  } catch (const nlohmann::json::exception& e) {
    throw io_error("failed to parse " + meta.string() + ": " + e.what());
  }
  EpisodeMeta out;
  try {
    out.instruction = j.at("instruction").get<std::string>();
    out.actions = j.at("actions").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw io_error("invalid metadata in " + meta.string() + ": " + e.what());
  }
  return out;
}

std::vector<std::string> discover_episodes(const std::string& data_dir) {
  const fs::path root(data_dir);
  if (!fs::is_directory(root)) throw io_error("not a directory: " + data_dir);
  if (fs::exists(root / "episode.json")) return {data_dir};
  std::vector<std::string> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "episode.json")) {
      dirs.push_back(entry.path().string());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

Episode load_episode(const std::string& dir) {
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw io_error("not a directory: " + dir);

  EpisodeMeta meta = load_episode_meta(dir);
  Episode episode;
  episode.id = root.filename().string();
  if (episode.id.empty()) episode.id = root.parent_path().filename().string();
  episode.instruction = std::move(meta.instruction);
  episode.actions = std::move(meta.actions);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    if (name.starts_with("frame_") && name.ends_with(".png")) {
      names.push_back(name);
    }
  }
  std::sort(names.begin(), names.end());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] != frame_name(static_cast<int>(i))) {
      throw validation_error("non-contiguous frames in " + dir + " (expected " +
                             frame_name(static_cast<int>(i)) + ", found " +
                             names[i] + ")");
    }
  }

  episode.frames.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    episode.frames.push_back(
        read_png((root / names[i]).string(), static_cast<int>(i)));
  }

  if (const auto report = validate_episode(episode); !report.ok()) {
    throw validation_error("invalid episode " + dir + ": " +
                           report.violations.front());
  }
  return episode;
}

void save_episode(const std::string& dir, const Episode& episode) {
  if (const auto report = validate_episode(episode); !report.ok()) {
    throw validation_error(report.violations.front());
  }
  fs::create_directories(dir);
  for (std::size_t i = 0; i < episode.frames.size(); ++i) {
    write_png((fs::path(dir) / frame_name(static_cast<int>(i))).string(),
              episode.frames[i]);
  }
  std::string meta = "{\"instruction\":" + json_string(episode.instruction);
  meta += ",\"actions\":[";
  for (std::size_t i = 0; i < episode.actions.size(); ++i) {
    if (i) meta += ',';
    meta += '[';
    for (std::size_t d = 0; d < episode.actions[i].size(); ++d) {
      if (d) meta += ',';
      meta += g17(episode.actions[i][d]);
    }
    meta += ']';
  }
  meta += "]}\n";
  write_text_file((fs::path(dir) / "episode.json").string(), meta);
}

std::string config_snapshot_json(const TraceConfig& trace_cfg,
                                 const TrackerConfig& tracker_cfg,
                                 const OverlayStyle& style, int n_bins) {
  std::string s = "{";
  s += "\"grid_size\":" + std::to_string(trace_cfg.grid_size);
  s += ",\"sample_count\":" + std::to_string(trace_cfg.sample_count);
  s += ",\"window\":" + std::to_string(trace_cfg.window);
  s += ",\"kappa\":" + g17(trace_cfg.kappa);
  s += ",\"dropout_prob\":" + g17(trace_cfg.dropout_prob);
  s += ",\"redraw_steps\":" + std::to_string(trace_cfg.redraw_steps);
  s += ",\"seed\":" + std::to_string(trace_cfg.seed);
  s += ",\"pyramid_levels\":" + std::to_string(tracker_cfg.pyramid_levels);
  s += ",\"window_half\":" + std::to_string(tracker_cfg.window_half);
  s += ",\"max_iters\":" + std::to_string(tracker_cfg.max_iters);
  s += ",\"epsilon\":" + g17(tracker_cfg.epsilon);
  s += ",\"min_eigen\":" + g17(tracker_cfg.min_eigen);
  s += ",\"linewidth\":" + std::to_string(style.linewidth);
  s += ",\"alpha\":" + g17(style.alpha);
  s += ",\"endpoint_radius\":" + std::to_string(style.endpoint_radius);
  s += ",\"palette\":[";
  for (std::size_t i = 0; i < style.palette.size(); ++i) {
    if (i) s += ',';
    s += '[' + std::to_string(style.palette[i].r) + ',' +
         std::to_string(style.palette[i].g) + ',' +
         std::to_string(style.palette[i].b) + ']';
  }
  s += "],\"n_bins\":" + std::to_string(n_bins);
  s += "}";
  return s;
}

std::string config_hash_hex(const std::string& snapshot_json) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(snapshot_json)));
  return buf;
}

namespace {

std::string trace_set_json(const TraceSet& ts) {
  std::string s = "{\"window\":[" + std::to_string(ts.window_start) + ',' +
                  std::to_string(ts.window_end) + "],\"traces\":[";
  for (std::size_t i = 0; i < ts.traces.size(); ++i) {
    if (i) s += ',';
    const auto& tr = ts.traces[i];
    s += "{\"origin\":" + std::to_string(tr.origin) + ",\"points\":[";
    for (std::size_t j = 0; j < tr.points.size(); ++j) {
      if (j) s += ',';
      s += '[' + f3(tr.points[j].x) + ',' + f3(tr.points[j].y) + ']';
    }
    s += "],\"valid\":[";
    for (std::size_t j = 0; j < tr.valid.size(); ++j) {
      if (j) s += ',';
      s += tr.valid[j] ? '1' : '0';
    }
    s += "]}";
  }
  s += "]}";
  return s;
}

std::string record_json_line(const PromptRecord& r) {
  nlohmann::ordered_json j;
  j["episode_id"] = r.episode_id;
  j["timestep"] = r.timestep;
  j["original_image"] = r.original_image;
  j["prompt_image"] = r.prompt_image;
  j["separator"] = r.separator;
  j["instruction"] = r.instruction;
  j["prompt_text"] = r.prompt_text;
  j["trace_present"] = r.trace_present;
  if (r.action_tokens) j["action_tokens"] = *r.action_tokens;
  return j.dump();
}

}  // namespace

void write_episode_outputs(const AnnotatedEpisode& annotated,
                           const std::string& out_dir,
                           const TraceConfig& trace_cfg,
                           const TrackerConfig& tracker_cfg,
                           const OverlayStyle& style,
                           const PromptTemplates& templates,
                           const BinTable* bins) {
  const Episode& episode = annotated.episode;
  if (episode.id.empty()) throw validation_error("episode id must not be empty");
  const fs::path dir = fs::path(out_dir) / episode.id;
  fs::create_directories(dir);

  const fs::path source =
      annotated.source_dir.empty() ? fs::path(episode.id) : fs::path(annotated.source_dir);

  std::string traces_doc = "{\"episode\":" + json_string(episode.id);
  traces_doc += ",\"kappa\":" + g17(trace_cfg.kappa);
  traces_doc += ",\"seed\":" + std::to_string(trace_cfg.seed);
  traces_doc += ",\"config\":" +
                config_snapshot_json(trace_cfg, tracker_cfg, style,
                                     bins ? bins->n_bins : 256);
  traces_doc += ",\"steps\":[";

  std::string records;
  for (std::size_t i = 0; i < annotated.steps.size(); ++i) {
    const StepAnnotation& step = annotated.steps[i];
    const std::string overlay_file = overlay_name(step.timestep);
    if (step.overlaid) {
      write_png((dir / overlay_file).string(), *step.overlaid);
    }

    if (i) traces_doc += ',';
    traces_doc += "{\"t\":" + std::to_string(step.timestep);
    traces_doc += ",\"history_len\":" + std::to_string(step.history_len);
    traces_doc += std::string(",\"dropped\":") + (step.dropped ? "true" : "false");
    traces_doc += ",\"trace\":";
    traces_doc += step.trace ? trace_set_json(*step.trace) : "null";
    traces_doc += "}";

    const PromptRecord record = build_prompt_record(
        step, episode, (source / frame_name(step.timestep)).string(),
        (fs::path(episode.id) / overlay_file).string(), templates, bins);
    records += record_json_line(record);
    records += '\n';
  }
  traces_doc += "]}\n";

  write_text_file((dir / "traces.json").string(), traces_doc);
  write_text_file((dir / "records.jsonl").string(), records);
}

void write_manifest(const std::string& out_dir, const Manifest& manifest) {
  std::string s = "{\"config_hash\":" + json_string(manifest.config_hash);
  s += ",\"episodes\":[";
  for (std::size_t i = 0; i < manifest.episodes.size(); ++i) {
    if (i) s += ',';
    s += json_string(manifest.episodes[i]);
  }
  s += "]}\n";
  write_text_file((fs::path(out_dir) / "manifest.json").string(), s);
}

Manifest read_manifest(const std::string& out_dir) {
  const std::string path = (fs::path(out_dir) / "manifest.json").string();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw io_error("failed to parse " + path + ": " + e.what());
  }
  Manifest m;
  try {
    m.config_hash = j.at("config_hash").get<std::string>();
    m.episodes = j.at("episodes").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw io_error("invalid manifest " + path + ": " + e.what());
  }
  return m;
}

Manifest write_annotated_dataset(std::span<const AnnotatedEpisode> episodes,
                                 const std::string& out_dir,
                                 const TraceConfig& trace_cfg,
                                 const TrackerConfig& tracker_cfg,
                                 const OverlayStyle& style,
                                 const PromptTemplates& templates,
                                 const BinTable* bins) {
  fs::create_directories(out_dir);
  Manifest manifest;
  manifest.config_hash = config_hash_hex(config_snapshot_json(
      trace_cfg, tracker_cfg, style, bins ? bins->n_bins : 256));
  for (const auto& annotated : episodes) {
    write_episode_outputs(annotated, out_dir, trace_cfg, tracker_cfg, style,
                          templates, bins);
    manifest.episodes.push_back(annotated.episode.id);
  }
  std::sort(manifest.episodes.begin(), manifest.episodes.end());
  write_manifest(out_dir, manifest);
  return manifest;
}

std::vector<PromptRecord> read_prompt_records(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::vector<PromptRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw io_error("invalid record in " + path + ": " + e.what());
    }
    PromptRecord r;
    try {
      r.episode_id = j.at("episode_id").get<std::string>();
      r.timestep = j.at("timestep").get<int>();
      r.original_image = j.at("original_image").get<std::string>();
      r.prompt_image = j.at("prompt_image").get<std::string>();
      r.separator = j.at("separator").get<std::string>();
      r.instruction = j.at("instruction").get<std::string>();
      r.prompt_text = j.at("prompt_text").get<std::string>();
      r.trace_present = j.at("trace_present").get<bool>();
      if (j.contains("action_tokens")) {
        r.action_tokens = j.at("action_tokens").get<std::vector<int>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw io_error("invalid record in " + path + ": " + e.what());
    }
    if (!r.trace_present && r.prompt_image != r.original_image) {
      throw validation_error("record without trace must reuse the original image");
    }
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace vtrace
