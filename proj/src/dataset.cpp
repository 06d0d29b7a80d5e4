#include "movebench/dataset.h"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <set>

#include "movebench/io.h"

namespace movebench {
namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

void require_keys(const json& obj, const std::set<std::string>& expected,
                  const char* what) {
  for (const auto& item : obj.items()) {
    if (!expected.count(item.key())) {
      throw FormatError(std::string(what) + ": unknown field '" + item.key() +
                        "' (format_version mismatch?)");
    }
  }
  for (const auto& key : expected) {
    if (!obj.contains(key)) {
      throw FormatError(std::string(what) + ": missing field '" + key + "'");
    }
  }
}

void append_schedule(std::string& out, const AugmentationSchedule& s) {
  const bool flags[5] = {s.pick_object_translation, s.pick_object_rotation,
                         s.pick_camera, s.place_target_translation,
                         s.place_camera};
  out += '[';
  for (int i = 0; i < 5; ++i) {
    if (i) out += ',';
    out += flags[i] ? '1' : '0';
  }
  out += ']';
}

AugmentationSchedule parse_schedule(const json& arr) {
  if (!arr.is_array() || arr.size() != 5) {
    throw FormatError("trajectory: schedule must be a 5-flag array");
  }
  AugmentationSchedule s;
  s.pick_object_translation = arr[0].get<int>() != 0;
  s.pick_object_rotation = arr[1].get<int>() != 0;
  s.pick_camera = arr[2].get<int>() != 0;
  s.place_target_translation = arr[3].get<int>() != 0;
  s.place_camera = arr[4].get<int>() != 0;
  return s;
}

std::string serialize_trajectory(const Trajectory& t) {
  std::string out;
  out.reserve(64 + t.observations.size() * 12 * 12);
  out += "{\"config\":{\"object\":[";
  out += format_g9(t.config.object_pos.x());
  out += ',';
  out += format_g9(t.config.object_pos.y());
  out += "],\"heading\":";
  out += format_g9(t.config.object_heading);
  out += ",\"target\":[";
  out += format_g9(t.config.target_pos.x());
  out += ',';
  out += format_g9(t.config.target_pos.y());
  out += "],\"camera\":";
  out += format_g9(t.config.camera_angle);
  out += ",\"level\":";
  out += std::to_string(static_cast<int>(t.config.level));
  out += "},\"schedule\":";
  append_schedule(out, t.schedule);
  out += ",\"seed\":";
  out += std::to_string(t.seed);
  out += ",\"length\":";
  out += std::to_string(t.length());
  out += ",\"obs\":[";
  bool first = true;
  for (const auto& obs : t.observations) {
    for (double v : obs) {
      if (!first) out += ',';
      first = false;
      out += format_g9(v);
    }
  }
  out += "],\"act\":[";
  first = true;
  for (const auto& act : t.actions) {
    const double vals[3] = {act.vx, act.vy, act.grasp};
    for (double v : vals) {
      if (!first) out += ',';
      first = false;
      out += format_g9(v);
    }
  }
  out += "]}";
  return out;
}

Trajectory parse_trajectory(const std::string& line, Paradigm paradigm) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("trajectory: bad JSON: ") + e.what());
  }
  require_keys(rec, {"config", "schedule", "seed", "length", "obs", "act"},
               "trajectory");
  require_keys(rec["config"], {"object", "heading", "target", "camera", "level"},
               "trajectory config");

  Trajectory t;
  t.paradigm = paradigm;
  const json& cfg = rec["config"];
  t.config.object_pos = {cfg["object"][0].get<double>(),
                         cfg["object"][1].get<double>()};
  t.config.object_heading = cfg["heading"].get<double>();
  t.config.target_pos = {cfg["target"][0].get<double>(),
                         cfg["target"][1].get<double>()};
  t.config.camera_angle = cfg["camera"].get<double>();
  const int level = cfg["level"].get<int>();
  if (level < 1 || level > 3) {
    throw FormatError("trajectory: level out of range");
  }
  t.config.level = static_cast<RandomizationLevel>(level);
  t.schedule = parse_schedule(rec["schedule"]);
  t.seed = rec["seed"].get<std::uint64_t>();

  const int length = rec["length"].get<int>();
  if (length < 1) throw FormatError("trajectory: non-positive length");
  const json& obs = rec["obs"];
  const json& act = rec["act"];
  if (!obs.is_array() ||
      obs.size() != static_cast<std::size_t>(length) * kObservationDim) {
    throw FormatError("trajectory: obs array size does not match length");
  }
  if (!act.is_array() ||
      act.size() != static_cast<std::size_t>(length) * kActionDim) {
    throw FormatError("trajectory: act array size does not match length");
  }
  t.observations.resize(length);
  for (int i = 0; i < length; ++i) {
    for (int j = 0; j < kObservationDim; ++j) {
      t.observations[i][j] = obs[i * kObservationDim + j].get<double>();
    }
  }
  t.actions.resize(length);
  for (int i = 0; i < length; ++i) {
    t.actions[i].vx = act[i * kActionDim + 0].get<double>();
    t.actions[i].vy = act[i * kActionDim + 1].get<double>();
    t.actions[i].grasp = act[i * kActionDim + 2].get<double>();
  }
  return t;
}

}  // namespace

std::string to_string(Paradigm p) {
  switch (p) {
    case Paradigm::kStatic: return "static";
    case Paradigm::kAdc: return "adc";
    case Paradigm::kMove: return "move";
  }
  throw std::invalid_argument("bad paradigm");
}

std::string to_string(Sampling s) {
  switch (s) {
    case Sampling::kSparse9: return "sparse9";
    case Sampling::kDenseUniform: return "dense";
    case Sampling::kCircle: return "circle";
  }
  throw std::invalid_argument("bad sampling");
}

Paradigm paradigm_from_string(const std::string& s) {
  if (s == "static") return Paradigm::kStatic;
  if (s == "adc") return Paradigm::kAdc;
  if (s == "move") return Paradigm::kMove;
  throw std::invalid_argument("unknown paradigm '" + s + "'");
}

Sampling sampling_from_string(const std::string& s) {
  if (s == "sparse9") return Sampling::kSparse9;
  if (s == "dense") return Sampling::kDenseUniform;
  if (s == "circle") return Sampling::kCircle;
  throw std::invalid_argument("unknown sampling '" + s + "'");
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  out += "{\"format_version\":";
  out += std::to_string(kFormatVersion);
  out += ",\"paradigm\":\"";
  out += to_string(dataset.paradigm);
  out += "\",\"sampling\":\"";
  out += to_string(dataset.sampling);
  out += "\",\"budget\":";
  out += std::to_string(dataset.budget);
  out += ",\"total_timesteps\":";
  out += std::to_string(dataset.total_timesteps);
  out += ",\"seed\":";
  out += std::to_string(dataset.seed);
  out += ",\"world_config_digest\":\"";
  out += dataset.world_config_digest;
  out += "\"}\n";
  for (const auto& t : dataset.trajectories) {
    out += serialize_trajectory(t);
    out += '\n';
  }
  out += std::to_string(crc32(out));
  out += '\n';
  return out;
}

Dataset parse_dataset(const std::string& text) {
  // Split off the trailer line, verify the checksum over everything before it.
  if (text.empty()) throw FormatError("dataset: empty file");
  std::size_t end = text.size();
  if (text[end - 1] == '\n') --end;
  const std::size_t trailer_start = text.rfind('\n', end == 0 ? 0 : end - 1);
  if (trailer_start == std::string::npos) {
    throw FormatError("dataset: missing checksum trailer");
  }
  const std::string trailer = text.substr(trailer_start + 1, end - trailer_start - 1);
  const std::string body = text.substr(0, trailer_start + 1);
  std::uint32_t declared = 0;
  try {
    declared = static_cast<std::uint32_t>(std::stoul(trailer));
  } catch (const std::exception&) {
    throw FormatError("dataset: checksum trailer is not a decimal integer");
  }
  if (crc32(body) != declared) {
    throw FormatError("dataset: checksum mismatch (truncated or corrupted)");
  }

  // Header line.
  std::size_t pos = body.find('\n');
  if (pos == std::string::npos) throw FormatError("dataset: missing header");
  json header;
  try {
    header = json::parse(body.substr(0, pos));
  } catch (const json::exception& e) {
    throw FormatError(std::string("dataset header: bad JSON: ") + e.what());
  }
  require_keys(header,
               {"format_version", "paradigm", "sampling", "budget",
                "total_timesteps", "seed", "world_config_digest"},
               "dataset header");
  if (header["format_version"].get<int>() != kFormatVersion) {
    throw FormatError("dataset: unsupported format_version " +
                      header["format_version"].dump());
  }

  Dataset ds;
  ds.paradigm = paradigm_from_string(header["paradigm"].get<std::string>());
  ds.sampling = sampling_from_string(header["sampling"].get<std::string>());
  ds.budget = header["budget"].get<std::int64_t>();
  ds.seed = header["seed"].get<std::uint64_t>();
  ds.world_config_digest = header["world_config_digest"].get<std::string>();
  const std::int64_t declared_total = header["total_timesteps"].get<std::int64_t>();

  std::size_t line_start = pos + 1;
  while (line_start < body.size()) {
    std::size_t line_end = body.find('\n', line_start);
    if (line_end == std::string::npos) line_end = body.size();
    const std::string line = body.substr(line_start, line_end - line_start);
    if (!line.empty()) {
      Trajectory t = parse_trajectory(line, ds.paradigm);
      ds.total_timesteps += t.length();
      ds.trajectories.push_back(std::move(t));
    }
    line_start = line_end + 1;
  }
  if (ds.total_timesteps != declared_total) {
    throw FormatError("dataset: total_timesteps does not match records");
  }
  return ds;
}

void write_dataset(const Dataset& dataset, const std::string& path) {
  write_file(path, serialize_dataset(dataset));
}

Dataset read_dataset(const std::string& path) {
  return parse_dataset(read_file(path));
}

}  // namespace movebench
