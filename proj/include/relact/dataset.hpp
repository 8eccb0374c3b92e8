#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relact/action_repr.hpp"
#include "relact/se3.hpp"

namespace relact {

inline constexpr std::string_view kDemoSchema = "relact-demo/1";
inline constexpr std::string_view kChunksSchema = "relact-chunks/1";
inline constexpr std::string_view kStatsSchema = "relact-stats/1";

/// Gripper state exactly as stored on disk. Not validated, so that records
/// with bad rotations or jaw angles can be loaded, inspected, and saved back
/// bit-for-bit.
struct RawGripper {
  Vec3 p = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  double jaw = 0.0;
};

struct DemoStep {
  double timestamp = 0.0;
  DualArm<RawGripper> proprioception;
  DualArm<RawGripper> command;
};

struct DemonstrationRecord {
  std::string schema_version{kDemoSchema};
  std::string task_name;
  double dt = 0.0;
  std::vector<DemoStep> steps;
  nlohmann::json metadata = nlohmann::json::object();
};

RawGripper to_raw(const GripperState& g);
/// Throws NonOrthonormal / NonFinite from the rotation and pose constructors.
GripperState to_gripper(const RawGripper& g);
DemoStep make_step(const Proprioception& x, const DualCommand& command);
Proprioception step_proprioception(const DemoStep& step);
DualCommand step_command(const DemoStep& step);

/// One JSON header line, then one JSON line per step.
void save_demo(const DemonstrationRecord& record, const std::filesystem::path& path);
/// Throws SchemaVersionMismatch, or MalformedRecord with the offending step.
DemonstrationRecord load_demo(const std::filesystem::path& path);

struct Finding {
  std::size_t step = 0;
  std::string category;  // "rotation", "jaw", "timestamp", "non_finite", "record"
  std::string message;
};

inline constexpr double kValidateRotationTolerance = 1e-6;

std::vector<Finding> validate(const DemonstrationRecord& record, const JawLimits& limits = {});

struct ExportedChunk {
  std::size_t start = 0;
  Proprioception input;
  std::vector<ActionVector20> target;
};

struct ChunkSet {
  RepresentationKind kind = RepresentationKind::CameraCentric;
  std::size_t chunk_size = kDefaultChunkSize;
  std::vector<ExportedChunk> chunks;
};

/// One chunk per start index in [0, T - C]. Parallel over start indices.
/// Throws RecordTooShort when T < C, MalformedRecord for invalid steps.
ChunkSet export_chunks(const DemonstrationRecord& record, RepresentationKind kind,
                       std::size_t chunk_size = kDefaultChunkSize);

/// Decodes every chunk against its input proprioception and returns the max
/// absolute deviation from the record's commands.
double max_chunk_roundtrip_error(const ChunkSet& set, const DemonstrationRecord& record);

inline constexpr double kStdFloor = 1e-6;

struct NormalizationStats {
  RepresentationKind kind = RepresentationKind::CameraCentric;
  ActionVector20 mean{};
  ActionVector20 std{};
  std::size_t num_samples = 0;
};

/// Population mean/std per dimension over every target step of every chunk,
/// std floored at 1e-6. Parallel over dimensions. Throws EmptyInput.
NormalizationStats compute_stats(const ChunkSet& set);

ActionVector20 normalize(const ActionVector20& v, const NormalizationStats& stats);
ActionVector20 denormalize(const ActionVector20& v, const NormalizationStats& stats);

void save_chunks(const ChunkSet& set, const std::filesystem::path& path);
ChunkSet load_chunks(const std::filesystem::path& path);
void save_stats(const NormalizationStats& stats, const std::filesystem::path& path);
NormalizationStats load_stats(const std::filesystem::path& path);

namespace serial {

/// Single-threaded reference implementations of the parallel kernels above.
ChunkSet export_chunks(const DemonstrationRecord& record, RepresentationKind kind,
                       std::size_t chunk_size = kDefaultChunkSize);
NormalizationStats compute_stats(const ChunkSet& set);

}  // namespace serial

}  // namespace relact
