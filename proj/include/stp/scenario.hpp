#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stp/detector.hpp"

namespace stp {

inline constexpr int kScenarioSchemaVersion = 1;

struct ScenarioFrame {
  long long index = 0;
  std::vector<GtObject> gt;

  friend bool operator==(const ScenarioFrame&, const ScenarioFrame&) = default;
};

struct ScenarioMeta {
  std::string name;
  std::uint64_t seed = 0;
  std::string generator;                 // empty for hand-written files
  std::map<std::string, double> params;  // generator parameters

  friend bool operator==(const ScenarioMeta&, const ScenarioMeta&) = default;
};

/// Ground-truth annotated frame sequence.
struct Scenario {
  int frame_w = 0;
  int frame_h = 0;
  std::vector<ScenarioFrame> frames;
  ScenarioMeta meta;

  std::size_t object_count() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

enum class ScenarioErrc {
  Io = 1,
  Parse,
  Schema,
  OutOfBounds,
  NonContiguousFrames,
  DuplicateObject,
  InvalidBox,
};

std::string_view to_string(ScenarioErrc code);

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(ScenarioErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ScenarioErrc code() const { return code_; }

 private:
  ScenarioErrc code_;
};

/// Checks frame contiguity, box validity, frame bounds and id uniqueness per
/// frame. Throws ScenarioError naming the offending frame and object.
void validate(const Scenario& scenario);

/// Canonical text form: a header object followed by one frame per line.
/// Keys are sorted, so re-saving a file written here reproduces it byte for
/// byte.
std::string to_text(const Scenario& scenario);
Scenario from_text(std::string_view text);

Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical text; identifies the scenario in reports.
std::uint64_t fingerprint(const Scenario& scenario);

enum class MotionModel { Static, Linear };

struct GeneratorParams {
  std::string name = "synthetic";
  int frame_w = 960;
  int frame_h = 544;
  int frames = 30;
  int objects = 10;
  MotionModel motion = MotionModel::Linear;
  double min_speed = 0.5;  // px/frame
  double max_speed = 3.0;  // px/frame
  double min_w = 10.0;
  double max_w = 20.0;
  double min_h = 20.0;
  double max_h = 36.0;
  bool enter_exit = false;  // objects appear and leave mid-sequence
  int min_lifetime = 10;    // frames, when enter_exit is set
  bool separated = true;    // no two boxes ever intersect
  std::uint64_t seed = 1;
};

/// Deterministic synthetic scenario. Objects move with constant velocity and
/// bounce off the frame edges, so boxes stay inside the frame.
/// Throws std::invalid_argument for bad parameters or when `separated`
/// placements cannot be found.
Scenario generate_scenario(const GeneratorParams& params);

}  // namespace stp
