#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vtrace/core.hpp"
#include "vtrace/rng.hpp"
#include "vtrace/synth.hpp"

namespace vtest {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vtrace_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }
  std::string sub(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

inline std::uint64_t frame_digest(const vtrace::Frame& f) {
  return vtrace::fnv1a64(std::string_view(
      reinterpret_cast<const char*>(f.pixels.data()), f.pixels.size()));
}

inline bool frames_equal(const vtrace::Frame& a, const vtrace::Frame& b) {
  return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
}

inline int whitespace_tokens(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  int count = 0;
  while (in >> tok) ++count;
  return count;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// A valid synthetic episode: translating noise frames plus well-formed
// actions and an instruction.
inline vtrace::Episode make_episode(int width, int height, int frame_count,
                                    int dx, int dy, std::uint64_t seed,
                                    const std::string& id = "ep") {
  vtrace::Episode ep;
  ep.frames = vtrace::make_translating_sequence(width, height, frame_count, dx,
                                                dy, seed);
  ep.instruction = "pick up the red block";
  ep.id = id;
  vtrace::SplitMix64 rng(seed ^ 0x5eedu);
  ep.actions.resize(static_cast<std::size_t>(frame_count));
  for (auto& a : ep.actions) {
    a = {rng.next_double() * 2 - 1, rng.next_double() * 2 - 1,
         rng.next_double() * 2 - 1, rng.next_double()};
  }
  return ep;
}

// A static episode (identical frames throughout).
inline vtrace::Episode make_static_episode(int width, int height,
                                           int frame_count, std::uint64_t seed,
                                           const std::string& id = "static") {
  vtrace::Episode ep = make_episode(width, height, frame_count, 0, 0, seed, id);
  return ep;
}

}  // namespace vtest
