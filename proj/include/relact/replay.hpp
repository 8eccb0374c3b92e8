#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relact/action_repr.hpp"
#include "relact/dataset.hpp"
#include "relact/kinematics.hpp"

namespace relact {

inline constexpr std::string_view kReportSchema = "relact-report/1";

using DualPath = DualArm<std::vector<Vec3>>;

/// Teleoperated reference: camera-frame commands, the proprioception read
/// before each command, and the ground-truth world-frame control-point path.
struct ReferenceTrajectory {
  std::vector<DualCommand> commands;
  std::vector<Proprioception> proprioception;
  DualPath true_path;
  DualArm<Pose> initial_true_pose;
  double dt = 0.01;
};

/// Gerono lemniscate x = a cos(th), y = a sin(th) cos(th) in the xy-plane of
/// `center`, constant orientation, th = 2 pi k / (n - 1) so the curve closes.
std::vector<Pose> generate_lemniscate(double scale_mm, std::size_t num_points, const Pose& center);

/// Executes the commands in `config`: places both grippers at the first
/// command, then for each step reads proprioception and servos (active noise
/// keyed by step index).
ReferenceTrajectory record_reference(const KinematicChain& chain, const RobotConfiguration& config,
                                     std::span<const DualCommand> commands, double dt);

struct ReplayResult {
  DualPath path;
  double rmse_mm = 0.0;
};

/// Pooled RMSE over both arms' points.
double dual_rmse(const DualPath& a, const DualPath& b);

/// Places the grippers at the reference's initial true pose, then executes
/// the reference re-encoded as consecutive chunks of `chunk_size` steps. Each
/// chunk is encoded against the recorded proprioception at its start and
/// decoded against the live proprioception of `config`.
ReplayResult replay(const KinematicChain& chain, const ReferenceTrajectory& reference,
                    RepresentationKind kind, const RobotConfiguration& config,
                    std::size_t chunk_size = kDefaultChunkSize);

struct LabeledConfiguration {
  std::string label;
  RobotConfiguration config;
};

struct ReplayCell {
  RepresentationKind kind = RepresentationKind::CameraCentric;
  std::string config_label;
  DualPath path;
  double rmse_mm = 0.0;
};

struct ReplayReport {
  std::uint64_t seed = 0;
  std::size_t num_points = 0;
  std::vector<std::string> config_labels;
  std::vector<RepresentationKind> kinds;  // CameraCentric, ToolCentric, HybridRelative order
  DualPath reference_path;
  std::vector<ReplayCell> cells;          // row-major: kind, then config label

  const ReplayCell& at(RepresentationKind kind, std::string_view label) const;
};

/// Cross product of kinds and configurations; cells replay in parallel.
ReplayReport run_experiment(const KinematicChain& chain, const ReferenceTrajectory& reference,
                            std::span<const LabeledConfiguration> configs,
                            std::span<const RepresentationKind> kinds, std::uint64_t seed = 0,
                            std::size_t chunk_size = kDefaultChunkSize);

namespace serial {

ReplayReport run_experiment(const KinematicChain& chain, const ReferenceTrajectory& reference,
                            std::span<const LabeledConfiguration> configs,
                            std::span<const RepresentationKind> kinds, std::uint64_t seed = 0,
                            std::size_t chunk_size = kDefaultChunkSize);

}  // namespace serial

/// Recomputes every cell's RMSE from its stored path; returns the max
/// absolute difference to the stored value.
double report_consistency_error(const ReplayReport& report);

// --- standard experiment ------------------------------------------------------

struct ExperimentParams {
  double scale_mm = 20.0;
  std::size_t num_points = 360;
  double dt = 0.01;
  /// Lemniscate centers in the endoscope-tip frame.
  Vec3 left_center{-40.0, 0.0, 100.0};
  Vec3 right_center{40.0, 0.0, 100.0};
  /// Shift applied to the two revolute setup joints of each PSM.
  double eval_shift_rad = 0.1;
  std::size_t chunk_size = kDefaultChunkSize;
};

std::vector<DualCommand> lemniscate_commands(const ExperimentParams& params);

/// RefConfig from the seed, EvalConfig1 / EvalConfig2 by shifting both PSMs'
/// revolute setup joints by (+s, -s) and (-s, +s).
std::vector<LabeledConfiguration> standard_configurations(const KinematicChain& chain,
                                                          std::uint64_t seed,
                                                          double eval_shift_rad);

DemonstrationRecord to_demonstration(const ReferenceTrajectory& reference, std::string task_name,
                                     nlohmann::json metadata = nlohmann::json::object());
/// Commands of a stored demonstration, validated into typed values.
std::vector<DualCommand> demonstration_commands(const DemonstrationRecord& record);

nlohmann::json report_to_json(const ReplayReport& report);
/// Columns: kind, config_label, rmse_mm, num_points, seed.
std::string report_table_csv(const ReplayReport& report);
/// Rows are representations, columns configurations.
std::string report_text_table(const ReplayReport& report);
/// Writes report.json, rmse_table.csv and paths/<kind>_<label>.csv.
void write_report(const ReplayReport& report, const std::filesystem::path& out_dir);

}  // namespace relact
