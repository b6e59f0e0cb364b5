#include "stp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "stp/rng.hpp"

namespace stp {

using nlohmann::json;

std::string_view to_string(ScenarioErrc code) {
  switch (code) {
    case ScenarioErrc::Io: return "io";
    case ScenarioErrc::Parse: return "parse";
    case ScenarioErrc::Schema: return "schema";
    case ScenarioErrc::OutOfBounds: return "out_of_bounds";
    case ScenarioErrc::NonContiguousFrames: return "non_contiguous_frames";
    case ScenarioErrc::DuplicateObject: return "duplicate_object";
    case ScenarioErrc::InvalidBox: return "invalid_box";
  }
  return "unknown";
}

std::size_t Scenario::object_count() const {
  std::size_t n = 0;
  for (const ScenarioFrame& f : frames) n += f.gt.size();
  return n;
}

namespace {

// Tolerates rounding in x + w for boxes placed flush with an edge.
constexpr double kBoundsSlack = 1e-6;

}  // namespace

void validate(const Scenario& s) {
  if (s.frame_w <= 0 || s.frame_h <= 0) {
    throw ScenarioError(ScenarioErrc::Schema, "frame size must be positive");
  }
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    const ScenarioFrame& f = s.frames[i];
    if (f.index != static_cast<long long>(i)) {
      throw ScenarioError(ScenarioErrc::NonContiguousFrames,
                          "frame at position " + std::to_string(i) + " has index " +
                              std::to_string(f.index) + "; indices must be contiguous from 0");
    }
    std::set<long long> ids;
    for (const GtObject& o : f.gt) {
      const std::string where =
          "frame " + std::to_string(f.index) + " object " + std::to_string(o.id);
      if (!o.box.valid()) throw ScenarioError(ScenarioErrc::InvalidBox, where + ": invalid box");
      if (o.box.x < -kBoundsSlack || o.box.y < -kBoundsSlack ||
          o.box.right() > s.frame_w + kBoundsSlack || o.box.bottom() > s.frame_h + kBoundsSlack) {
        throw ScenarioError(ScenarioErrc::OutOfBounds, where + ": box exceeds frame bounds");
      }
      if (!ids.insert(o.id).second) {
        throw ScenarioError(ScenarioErrc::DuplicateObject, where + ": duplicate object id");
      }
    }
  }
}

namespace {

json header_json(const Scenario& s) {
  json params = json::object();
  for (const auto& [k, v] : s.meta.params) params[k] = v;
  return json{{"schema_version", kScenarioSchemaVersion},
              {"name", s.meta.name},
              {"frame_w", s.frame_w},
              {"frame_h", s.frame_h},
              {"seed", s.meta.seed},
              {"generator", s.meta.generator},
              {"params", params},
              {"frame_count", s.frames.size()}};
}

json frame_json(const ScenarioFrame& f) {
  json gt = json::array();
  for (const GtObject& o : f.gt) {
    gt.push_back(json{{"id", o.id},
                      {"x", o.box.x},
                      {"y", o.box.y},
                      {"w", o.box.w},
                      {"h", o.box.h},
                      {"class_id", o.box.class_id}});
  }
  return json{{"index", f.index}, {"gt", gt}};
}

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ScenarioError(ScenarioErrc::Schema, where + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ScenarioError(ScenarioErrc::Schema, where + ": bad field '" + key + "': " + e.what());
  }
}

}  // namespace

std::string to_text(const Scenario& s) {
  std::string out = header_json(s).dump();
  out += '\n';
  for (const ScenarioFrame& f : s.frames) {
    out += frame_json(f).dump();
    out += '\n';
  }
  return out;
}

Scenario from_text(std::string_view text) {
  std::vector<json> records;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      records.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ScenarioError(ScenarioErrc::Parse,
                          "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (records.empty()) throw ScenarioError(ScenarioErrc::Parse, "empty scenario file");

  const json& head = records.front();
  const auto version = field<int>(head, "schema_version", "header");
  if (version != kScenarioSchemaVersion) {
    throw ScenarioError(ScenarioErrc::Schema,
                        "unsupported schema_version " + std::to_string(version));
  }
  Scenario s;
  s.frame_w = field<int>(head, "frame_w", "header");
  s.frame_h = field<int>(head, "frame_h", "header");
  s.meta.name = field<std::string>(head, "name", "header");
  s.meta.seed = field<std::uint64_t>(head, "seed", "header");
  s.meta.generator = field<std::string>(head, "generator", "header");
  s.meta.params = field<std::map<std::string, double>>(head, "params", "header");
  const auto declared = field<std::size_t>(head, "frame_count", "header");
  if (declared != records.size() - 1) {
    throw ScenarioError(ScenarioErrc::Schema,
                        "header declares " + std::to_string(declared) + " frames, file has " +
                            std::to_string(records.size() - 1));
  }

  for (std::size_t i = 1; i < records.size(); ++i) {
    const std::string where = "frame record " + std::to_string(i - 1);
    ScenarioFrame f;
    f.index = field<long long>(records[i], "index", where);
    const json gt = field<json>(records[i], "gt", where);
    if (!gt.is_array()) throw ScenarioError(ScenarioErrc::Schema, where + ": 'gt' must be a list");
    for (const json& o : gt) {
      GtObject obj;
      obj.id = field<long long>(o, "id", where);
      obj.box.x = field<double>(o, "x", where);
      obj.box.y = field<double>(o, "y", where);
      obj.box.w = field<double>(o, "w", where);
      obj.box.h = field<double>(o, "h", where);
      obj.box.class_id = field<int>(o, "class_id", where);
      obj.box.confidence = 1.0;
      f.gt.push_back(obj);
    }
    s.frames.push_back(std::move(f));
  }
  validate(s);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(ScenarioErrc::Io, "cannot open scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  validate(scenario);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ScenarioError(ScenarioErrc::Io, "cannot write scenario " + path.string());
  out << to_text(scenario);
  if (!out) throw ScenarioError(ScenarioErrc::Io, "write failed for " + path.string());
}

std::uint64_t fingerprint(const Scenario& scenario) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_text(scenario)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct Mover {
  double x0, y0, w, h, vx, vy;
  long long enter, exit;  // present for enter <= t < exit

  // Constant-velocity motion folded back into [0, range] at the edges.
  static double fold(double p, double range) {
    if (range <= 0.0) return 0.0;
    const double period = 2.0 * range;
    double q = std::fmod(p, period);
    if (q < 0.0) q += period;
    return q <= range ? q : period - q;
  }

  bool present(long long t) const { return t >= enter && t < exit; }

  Box at(long long t, int frame_w, int frame_h) const {
    const double dt = static_cast<double>(t - enter);
    Box b;
    b.x = fold(x0 + vx * dt, frame_w - w);
    b.y = fold(y0 + vy * dt, frame_h - h);
    b.w = w;
    b.h = h;
    b.confidence = 1.0;
    b.class_id = 0;
    return b;
  }
};

constexpr int kPlacementAttempts = 500;

}  // namespace

Scenario generate_scenario(const GeneratorParams& p) {
  if (p.frame_w <= 0 || p.frame_h <= 0) throw std::invalid_argument("frame size must be positive");
  if (p.frames < 0 || p.objects < 0) throw std::invalid_argument("counts must be non-negative");
  if (!(p.min_w > 0.0 && p.min_w <= p.max_w && p.max_w <= p.frame_w) ||
      !(p.min_h > 0.0 && p.min_h <= p.max_h && p.max_h <= p.frame_h)) {
    throw std::invalid_argument("object size range invalid for frame");
  }
  if (!(p.min_speed >= 0.0 && p.min_speed <= p.max_speed)) {
    throw std::invalid_argument("speed range invalid");
  }
  if (p.enter_exit && (p.min_lifetime < 1 || p.min_lifetime > p.frames)) {
    throw std::invalid_argument("min_lifetime must lie in [1, frames]");
  }

  SplitMix64 rng(mix64(p.seed));
  std::vector<Mover> movers;
  for (int k = 0; k < p.objects; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementAttempts && !placed; ++attempt) {
      Mover m{};
      m.w = rng.uniform(p.min_w, p.max_w);
      m.h = rng.uniform(p.min_h, p.max_h);
      m.x0 = rng.uniform(0.0, p.frame_w - m.w);
      m.y0 = rng.uniform(0.0, p.frame_h - m.h);
      if (p.motion == MotionModel::Linear) {
        const double speed = rng.uniform(p.min_speed, p.max_speed);
        const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
        m.vx = speed * std::cos(angle);
        m.vy = speed * std::sin(angle);
      }
      m.enter = 0;
      m.exit = p.frames;
      if (p.enter_exit) {
        m.enter = rng.range(0, p.frames - p.min_lifetime);
        m.exit = rng.range(m.enter + p.min_lifetime, p.frames);
      }

      placed = true;
      if (p.separated) {
        for (const Mover& other : movers) {
          for (long long t = std::max(m.enter, other.enter);
               t < std::min(m.exit, other.exit) && placed; ++t) {
            if (intersection_area(m.at(t, p.frame_w, p.frame_h),
                                  other.at(t, p.frame_w, p.frame_h)) > 0.0) {
              placed = false;
            }
          }
          if (!placed) break;
        }
      }
      if (placed) movers.push_back(m);
    }
    if (!placed) {
      throw std::invalid_argument("could not place object " + std::to_string(k) +
                                  " without overlap; reduce the object count");
    }
  }

  Scenario s;
  s.frame_w = p.frame_w;
  s.frame_h = p.frame_h;
  s.meta.name = p.name;
  s.meta.seed = p.seed;
  s.meta.generator = p.motion == MotionModel::Static ? "static" : "linear";
  s.meta.params = {{"objects", double(p.objects)},   {"frames", double(p.frames)},
                   {"min_speed", p.min_speed},       {"max_speed", p.max_speed},
                   {"min_w", p.min_w},               {"max_w", p.max_w},
                   {"min_h", p.min_h},               {"max_h", p.max_h},
                   {"enter_exit", p.enter_exit ? 1.0 : 0.0},
                   {"min_lifetime", double(p.min_lifetime)},
                   {"separated", p.separated ? 1.0 : 0.0}};
  s.frames.reserve(static_cast<std::size_t>(p.frames));
  for (long long t = 0; t < p.frames; ++t) {
    ScenarioFrame f;
    f.index = t;
    for (std::size_t k = 0; k < movers.size(); ++k) {
      if (!movers[k].present(t)) continue;
      f.gt.push_back(GtObject{static_cast<long long>(k) + 1, movers[k].at(t, p.frame_w, p.frame_h)});
    }
    s.frames.push_back(std::move(f));
  }
  return s;
}

}  // namespace stp
