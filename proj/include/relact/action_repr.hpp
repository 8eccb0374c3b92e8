#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "relact/se3.hpp"

namespace relact {

enum class ArmSide { Left, Right };
inline constexpr std::array<ArmSide, 2> kArms = {ArmSide::Left, ArmSide::Right};

template <typename T>
struct DualArm {
  T left;
  T right;

  T& operator[](ArmSide side) { return side == ArmSide::Left ? left : right; }
  const T& operator[](ArmSide side) const { return side == ArmSide::Left ? left : right; }
};

struct JawLimits {
  double min = 0.0;
  double max = std::numbers::pi / 3.0;
};

/// Gripper pose in the endoscope-tip frame plus jaw opening (rad).
struct GripperState {
  Pose pose;
  double jaw = 0.0;
};

struct Proprioception {
  DualArm<GripperState> arms;
  double timestamp = 0.0;
};

using DualCommand = DualArm<GripperState>;

enum class RepresentationKind { CameraCentric, ToolCentric, HybridRelative };
inline constexpr std::array<RepresentationKind, 3> kAllKinds = {
    RepresentationKind::CameraCentric, RepresentationKind::ToolCentric,
    RepresentationKind::HybridRelative};

std::string_view to_string(RepresentationKind kind);
/// Accepts "camera", "tool", "hybrid" (and the full enumerator names).
RepresentationKind parse_kind(std::string_view text);

struct ArmAction {
  RepresentationKind kind = RepresentationKind::CameraCentric;
  std::variant<Pose, HybridDelta> payload;
  double jaw = 0.0;

  const Pose& pose() const { return std::get<Pose>(payload); }
  const HybridDelta& delta() const { return std::get<HybridDelta>(payload); }
};

using ActionStep = DualArm<ArmAction>;

inline constexpr std::size_t kDefaultChunkSize = 100;

struct ActionChunk {
  RepresentationKind kind = RepresentationKind::CameraCentric;
  std::vector<ActionStep> steps;

  std::size_t horizon() const { return steps.size(); }
};

inline constexpr std::size_t kActionDims = 20;
inline constexpr std::size_t kArmDims = 10;
/// Per arm: position(3), rot6d(6), jaw(1); left block first.
using ActionVector20 = std::array<double, kActionDims>;

ActionChunk encode_camera_centric(std::span<const DualCommand> commands, std::size_t t,
                                  std::size_t horizon);
ActionChunk encode_tool_centric(const Proprioception& x_t, std::span<const DualCommand> commands,
                                std::size_t t, std::size_t horizon);
ActionChunk encode_hybrid(const Proprioception& x_t, std::span<const DualCommand> commands,
                          std::size_t t, std::size_t horizon);
ActionChunk encode(RepresentationKind kind, const Proprioception& x_t,
                   std::span<const DualCommand> commands, std::size_t t, std::size_t horizon);

std::vector<DualCommand> decode_camera_centric(const ActionChunk& chunk, const Proprioception& x_t);
std::vector<DualCommand> decode_tool_centric(const ActionChunk& chunk, const Proprioception& x_t);
std::vector<DualCommand> decode_hybrid(const ActionChunk& chunk, const Proprioception& x_t);
std::vector<DualCommand> decode(const ActionChunk& chunk, const Proprioception& x_t);

/// Single-arm decode against the arm's reference pose.
GripperState decode_arm(const ArmAction& action, const Pose& reference);

ActionVector20 to_action_vector(const ActionStep& step);
ActionStep from_action_vector(const ActionVector20& v, RepresentationKind kind);

}  // namespace relact
