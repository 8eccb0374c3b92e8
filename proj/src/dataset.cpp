#include "relact/dataset.hpp"

#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <string>

#include "relact/error.hpp"

namespace relact {

using nlohmann::json;

RawGripper to_raw(const GripperState& g) { return {g.pose.p(), g.pose.R().matrix(), g.jaw}; }

GripperState to_gripper(const RawGripper& g) { return {Pose(g.p, Rotation3(g.R)), g.jaw}; }

DemoStep make_step(const Proprioception& x, const DualCommand& command) {
  DemoStep step;
  step.timestamp = x.timestamp;
  for (ArmSide side : kArms) {
    step.proprioception[side] = to_raw(x.arms[side]);
    step.command[side] = to_raw(command[side]);
  }
  return step;
}

Proprioception step_proprioception(const DemoStep& step) {
  Proprioception x;
  x.timestamp = step.timestamp;
  for (ArmSide side : kArms) x.arms[side] = to_gripper(step.proprioception[side]);
  return x;
}

DualCommand step_command(const DemoStep& step) {
  return {to_gripper(step.command.left), to_gripper(step.command.right)};
}

// --- serialization -----------------------------------------------------------

namespace {

[[noreturn]] void malformed(const std::string& msg, std::optional<std::size_t> step) {
  throw Error(ErrorCode::MalformedRecord, msg, step);
}

json raw_to_json(const RawGripper& g) {
  json r = json::array();
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) r.push_back(g.R(row, col));
  }
  return json{{"p", {g.p.x(), g.p.y(), g.p.z()}}, {"R", r}, {"jaw", g.jaw}};
}

double number(const json& j) {
  if (!j.is_number()) throw std::invalid_argument("expected a number, got " + j.dump());
  return j.get<double>();
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

const json& sized_array(const json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) {
    throw std::invalid_argument(std::string(what) + " must be an array of " + std::to_string(n));
  }
  return j;
}

RawGripper raw_from_json(const json& j) {
  RawGripper g;
  const json& p = sized_array(member(j, "p"), 3, "p");
  for (int i = 0; i < 3; ++i) g.p[i] = number(p[i]);
  const json& r = sized_array(member(j, "R"), 9, "R");
  for (int i = 0; i < 9; ++i) g.R(i / 3, i % 3) = number(r[i]);
  g.jaw = number(member(j, "jaw"));
  return g;
}

bool raw_finite(const RawGripper& g) {
  return g.p.allFinite() && g.R.allFinite() && std::isfinite(g.jaw);
}

json proprio_to_json(const Proprioception& x) {
  return json{{"t", x.timestamp}, {"l", raw_to_json(to_raw(x.arms.left))},
              {"r", raw_to_json(to_raw(x.arms.right))}};
}

Proprioception proprio_from_json(const json& j) {
  Proprioception x;
  x.timestamp = number(member(j, "t"));
  x.arms.left = to_gripper(raw_from_json(member(j, "l")));
  x.arms.right = to_gripper(raw_from_json(member(j, "r")));
  return x;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

void check_schema(const json& header, std::string_view expected) {
  if (!header.is_object() || !header.contains("schema") || !header.at("schema").is_string()) {
    throw Error(ErrorCode::MalformedRecord, "header lacks a schema field");
  }
  const std::string got = header.at("schema").get<std::string>();
  if (got != expected) {
    throw Error(ErrorCode::SchemaVersionMismatch,
                "expected " + std::string(expected) + ", got " + got);
  }
}

json parse_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::MalformedRecord, "empty file");
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("header: ") + e.what());
  }
}

}  // namespace

void save_demo(const DemonstrationRecord& record, const std::filesystem::path& path) {
  for (std::size_t i = 0; i < record.steps.size(); ++i) {
    const DemoStep& s = record.steps[i];
    bool finite = std::isfinite(s.timestamp);
    for (ArmSide side : kArms) {
      finite = finite && raw_finite(s.proprioception[side]) && raw_finite(s.command[side]);
    }
    if (!finite) throw Error(ErrorCode::NonFinite, "cannot serialize non-finite values", i);
  }
  std::ofstream out = open_out(path);
  const json header{{"schema", record.schema_version},
                    {"task", record.task_name},
                    {"dt", record.dt},
                    {"num_steps", record.steps.size()},
                    {"metadata", record.metadata}};
  out << header.dump() << '\n';
  for (const DemoStep& s : record.steps) {
    const json line{{"t", s.timestamp},
                    {"x", {{"l", raw_to_json(s.proprioception.left)},
                           {"r", raw_to_json(s.proprioception.right)}}},
                    {"a", {{"l", raw_to_json(s.command.left)}, {"r", raw_to_json(s.command.right)}}}};
    out << line.dump() << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

DemonstrationRecord load_demo(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const json header = parse_header(in);
  check_schema(header, kDemoSchema);
  DemonstrationRecord record;
  std::size_t declared = 0;
  try {
    record.task_name = member(header, "task").get<std::string>();
    record.dt = number(member(header, "dt"));
    declared = member(header, "num_steps").get<std::size_t>();
    record.metadata = header.value("metadata", json::object());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("header: ") + e.what());
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t index = record.steps.size();
    if (index >= declared) malformed("more steps than the declared " + std::to_string(declared), index);
    DemoStep step;
    try {
      const json j = json::parse(line);
      step.timestamp = number(member(j, "t"));
      const json& x = member(j, "x");
      const json& a = member(j, "a");
      step.proprioception.left = raw_from_json(member(x, "l"));
      step.proprioception.right = raw_from_json(member(x, "r"));
      step.command.left = raw_from_json(member(a, "l"));
      step.command.right = raw_from_json(member(a, "r"));
    } catch (const std::exception& e) {
      malformed(e.what(), index);
    }
    if (index > 0 && !(step.timestamp > record.steps.back().timestamp)) {
      malformed("timestamp " + std::to_string(step.timestamp) + " does not increase", index);
    }
    record.steps.push_back(std::move(step));
  }
  if (record.steps.size() != declared) {
    malformed("file ends after " + std::to_string(record.steps.size()) + " of " +
                  std::to_string(declared) + " steps",
              record.steps.size());
  }
  if (record.steps.empty()) malformed("record has no steps", std::nullopt);
  return record;
}

// --- validation --------------------------------------------------------------

std::vector<Finding> validate(const DemonstrationRecord& record, const JawLimits& limits) {
  std::vector<Finding> findings;
  auto add = [&](std::size_t step, const char* category, std::string msg) {
    findings.push_back({step, category, std::move(msg)});
  };
  if (record.schema_version != kDemoSchema) {
    add(0, "record", "schema " + record.schema_version + " is not " + std::string(kDemoSchema));
  }
  if (record.steps.empty()) add(0, "record", "record has no steps");
  if (!(record.dt > 0.0) || !std::isfinite(record.dt)) add(0, "record", "dt must be > 0");

  for (std::size_t i = 0; i < record.steps.size(); ++i) {
    const DemoStep& s = record.steps[i];
    if (!std::isfinite(s.timestamp) || s.timestamp < 0.0) {
      add(i, "timestamp", "timestamp must be finite and >= 0");
    }
    if (i > 0) {
      const double gap = s.timestamp - record.steps[i - 1].timestamp;
      if (!(gap > 0.0)) {
        add(i, "timestamp", "timestamp does not increase");
      } else if (record.dt > 0.0 && std::abs(gap - record.dt) > 1e-6 * std::max(1.0, record.dt)) {
        add(i, "timestamp", "spacing " + std::to_string(gap) + " s differs from dt");
      }
    }
    const std::pair<const char*, const DualArm<RawGripper>*> groups[] = {
        {"proprioception", &s.proprioception}, {"command", &s.command}};
    for (const auto& [label, grippers] : groups) {
      for (ArmSide side : kArms) {
        const RawGripper& g = (*grippers)[side];
        const std::string where =
            std::string(label) + (side == ArmSide::Left ? " left" : " right");
        if (!raw_finite(g)) {
          add(i, "non_finite", where + " has non-finite values");
          continue;
        }
        const double ortho = orthonormality_error(g.R);
        const double det = g.R.determinant();
        if (ortho > kValidateRotationTolerance || std::abs(det - 1.0) > kValidateRotationTolerance) {
          add(i, "rotation", where + ": orthonormality error " + std::to_string(ortho) +
                                 ", det " + std::to_string(det));
        }
        if (g.jaw < limits.min || g.jaw > limits.max) {
          add(i, "jaw", where + ": jaw " + std::to_string(g.jaw) + " rad outside [" +
                            std::to_string(limits.min) + ", " + std::to_string(limits.max) + "]");
        }
      }
    }
  }
  return findings;
}

// --- chunk export ------------------------------------------------------------

namespace {

struct TypedRecord {
  std::vector<Proprioception> proprioception;
  std::vector<DualCommand> commands;
};

TypedRecord typed(const DemonstrationRecord& record, std::size_t chunk_size) {
  if (chunk_size == 0) throw Error(ErrorCode::InvalidParameter, "chunk size must be >= 1");
  if (record.steps.size() < chunk_size) {
    throw Error(ErrorCode::RecordTooShort, std::to_string(record.steps.size()) +
                                               " steps, chunk size " + std::to_string(chunk_size));
  }
  TypedRecord out;
  out.proprioception.reserve(record.steps.size());
  out.commands.reserve(record.steps.size());
  for (std::size_t i = 0; i < record.steps.size(); ++i) {
    try {
      out.proprioception.push_back(step_proprioception(record.steps[i]));
      out.commands.push_back(step_command(record.steps[i]));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedRecord, e.what(), i);
    }
  }
  return out;
}

ExportedChunk make_chunk(RepresentationKind kind, const TypedRecord& rec, std::size_t t,
                         std::size_t chunk_size) {
  const ActionChunk chunk = encode(kind, rec.proprioception[t], rec.commands, t, chunk_size);
  ExportedChunk out{t, rec.proprioception[t], {}};
  out.target.reserve(chunk_size);
  for (const ActionStep& step : chunk.steps) out.target.push_back(to_action_vector(step));
  return out;
}

}  // namespace

ChunkSet export_chunks(const DemonstrationRecord& record, RepresentationKind kind,
                       std::size_t chunk_size) {
  const TypedRecord rec = typed(record, chunk_size);
  const auto count = static_cast<std::ptrdiff_t>(record.steps.size() - chunk_size + 1);
  ChunkSet set{kind, chunk_size, std::vector<ExportedChunk>(static_cast<std::size_t>(count))};
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t t = 0; t < count; ++t) {
    try {
      set.chunks[static_cast<std::size_t>(t)] =
          make_chunk(kind, rec, static_cast<std::size_t>(t), chunk_size);
    } catch (...) {
#pragma omp critical(relact_export_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return set;
}

double max_chunk_roundtrip_error(const ChunkSet& set, const DemonstrationRecord& record) {
  double worst = 0.0;
  for (const ExportedChunk& c : set.chunks) {
    ActionChunk chunk{set.kind, {}};
    for (const ActionVector20& v : c.target) chunk.steps.push_back(from_action_vector(v, set.kind));
    const std::vector<DualCommand> decoded = decode(chunk, c.input);
    for (std::size_t s = 0; s < decoded.size(); ++s) {
      const std::size_t index = c.start + s;
      if (index >= record.steps.size()) {
        throw Error(ErrorCode::LengthMismatch, "chunk extends past the record", index);
      }
      const DualCommand source = step_command(record.steps[index]);
      for (ArmSide side : kArms) {
        worst = std::max(worst, max_abs_diff(decoded[s][side].pose, source[side].pose));
        worst = std::max(worst, std::abs(decoded[s][side].jaw - source[side].jaw));
      }
    }
  }
  return worst;
}

// --- statistics --------------------------------------------------------------

namespace {

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::size_t sample_count(const ChunkSet& set) {
  std::size_t n = 0;
  for (const ExportedChunk& c : set.chunks) n += c.target.size();
  return n;
}

void dimension_stats(const ChunkSet& set, std::size_t d, std::size_t n, double& mean, double& sd) {
  CompensatedSum sum;
  for (const ExportedChunk& c : set.chunks) {
    for (const ActionVector20& v : c.target) sum.add(v[d]);
  }
  const double count = static_cast<double>(n);
  double m = sum.value() / count;
  CompensatedSum resid;
  CompensatedSum sq;
  for (const ExportedChunk& c : set.chunks) {
    for (const ActionVector20& v : c.target) {
      const double e = v[d] - m;
      resid.add(e);
      sq.add(e * e);
    }
  }
  // Second-pass correction of the mean and of the variance.
  const double r = resid.value() / count;
  m += r;
  const double var = std::max(0.0, sq.value() / count - r * r);
  mean = m;
  sd = std::max(std::sqrt(var), kStdFloor);
}

NormalizationStats stats_header(const ChunkSet& set) {
  NormalizationStats stats;
  stats.kind = set.kind;
  stats.num_samples = sample_count(set);
  if (stats.num_samples == 0) throw Error(ErrorCode::EmptyInput, "no chunk targets to summarize");
  return stats;
}

}  // namespace

NormalizationStats compute_stats(const ChunkSet& set) {
  NormalizationStats stats = stats_header(set);
  const auto dims = static_cast<std::ptrdiff_t>(kActionDims);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t d = 0; d < dims; ++d) {
    const auto i = static_cast<std::size_t>(d);
    dimension_stats(set, i, stats.num_samples, stats.mean[i], stats.std[i]);
  }
  return stats;
}

ActionVector20 normalize(const ActionVector20& v, const NormalizationStats& stats) {
  ActionVector20 out;
  for (std::size_t d = 0; d < kActionDims; ++d) out[d] = (v[d] - stats.mean[d]) / stats.std[d];
  return out;
}

ActionVector20 denormalize(const ActionVector20& v, const NormalizationStats& stats) {
  ActionVector20 out;
  for (std::size_t d = 0; d < kActionDims; ++d) out[d] = v[d] * stats.std[d] + stats.mean[d];
  return out;
}

namespace serial {

ChunkSet export_chunks(const DemonstrationRecord& record, RepresentationKind kind,
                       std::size_t chunk_size) {
  const TypedRecord rec = typed(record, chunk_size);
  ChunkSet set{kind, chunk_size, {}};
  for (std::size_t t = 0; t + chunk_size <= record.steps.size(); ++t) {
    set.chunks.push_back(make_chunk(kind, rec, t, chunk_size));
  }
  return set;
}

NormalizationStats compute_stats(const ChunkSet& set) {
  NormalizationStats stats = stats_header(set);
  for (std::size_t d = 0; d < kActionDims; ++d) {
    dimension_stats(set, d, stats.num_samples, stats.mean[d], stats.std[d]);
  }
  return stats;
}

}  // namespace serial

// --- chunk / stats files -----------------------------------------------------

void save_chunks(const ChunkSet& set, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  const json header{{"schema", std::string(kChunksSchema)},
                    {"kind", std::string(to_string(set.kind))},
                    {"chunk_size", set.chunk_size},
                    {"num_chunks", set.chunks.size()}};
  out << header.dump() << '\n';
  for (const ExportedChunk& c : set.chunks) {
    json target = json::array();
    for (const ActionVector20& v : c.target) target.push_back(v);
    out << json{{"start", c.start}, {"input", proprio_to_json(c.input)}, {"target", target}}.dump()
        << '\n';
  }
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

ChunkSet load_chunks(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  const json header = parse_header(in);
  check_schema(header, kChunksSchema);
  ChunkSet set;
  std::size_t declared = 0;
  try {
    set.kind = parse_kind(member(header, "kind").get<std::string>());
    set.chunk_size = member(header, "chunk_size").get<std::size_t>();
    declared = member(header, "num_chunks").get<std::size_t>();
  } catch (const std::exception& e) {
    throw Error(ErrorCode::MalformedRecord, std::string("header: ") + e.what());
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::size_t index = set.chunks.size();
    ExportedChunk c;
    try {
      const json j = json::parse(line);
      c.start = member(j, "start").get<std::size_t>();
      c.input = proprio_from_json(member(j, "input"));
      for (const json& v : member(j, "target")) {
        const json& arr = sized_array(v, kActionDims, "target vector");
        ActionVector20 a;
        for (std::size_t d = 0; d < kActionDims; ++d) a[d] = number(arr[d]);
        c.target.push_back(a);
      }
      if (c.target.size() != set.chunk_size) throw std::invalid_argument("target length != chunk_size");
    } catch (const std::exception& e) {
      malformed(e.what(), index);
    }
    set.chunks.push_back(std::move(c));
  }
  if (set.chunks.size() != declared) {
    malformed("expected " + std::to_string(declared) + " chunks", set.chunks.size());
  }
  return set;
}

void save_stats(const NormalizationStats& stats, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  const json j{{"schema", std::string(kStatsSchema)},
               {"kind", std::string(to_string(stats.kind))},
               {"dims", kActionDims},
               {"mean", stats.mean},
               {"std", stats.std},
               {"num_samples", stats.num_samples}};
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

NormalizationStats load_stats(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
  check_schema(j, kStatsSchema);
  NormalizationStats stats;
  try {
    stats.kind = parse_kind(member(j, "kind").get<std::string>());
    if (member(j, "dims").get<std::size_t>() != kActionDims) throw std::invalid_argument("dims != 20");
    stats.mean = sized_array(member(j, "mean"), kActionDims, "mean").get<ActionVector20>();
    stats.std = sized_array(member(j, "std"), kActionDims, "std").get<ActionVector20>();
    stats.num_samples = member(j, "num_samples").get<std::size_t>();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::MalformedRecord, e.what());
  }
  return stats;
}

}  // namespace relact
