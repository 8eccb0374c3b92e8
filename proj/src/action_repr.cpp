#include "relact/action_repr.hpp"

#include <string>

#include "relact/error.hpp"

namespace relact {

std::string_view to_string(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::CameraCentric: return "camera";
    case RepresentationKind::ToolCentric: return "tool";
    case RepresentationKind::HybridRelative: return "hybrid";
  }
  return "unknown";
}

RepresentationKind parse_kind(std::string_view text) {
  if (text == "camera" || text == "CameraCentric") return RepresentationKind::CameraCentric;
  if (text == "tool" || text == "ToolCentric") return RepresentationKind::ToolCentric;
  if (text == "hybrid" || text == "HybridRelative") return RepresentationKind::HybridRelative;
  throw Error(ErrorCode::InvalidParameter, "unknown representation '" + std::string(text) + "'");
}

namespace {

void check_horizon(std::span<const DualCommand> commands, std::size_t t, std::size_t horizon) {
  if (horizon == 0) throw Error(ErrorCode::InvalidParameter, "chunk horizon must be >= 1");
  if (t > commands.size() || horizon > commands.size() - t) {
    throw Error(ErrorCode::HorizonOverrun,
                "t=" + std::to_string(t) + " C=" + std::to_string(horizon) +
                    " exceeds " + std::to_string(commands.size()) + " commands");
  }
}

template <typename EncodeArm>
ActionChunk encode_with(RepresentationKind kind, std::span<const DualCommand> commands,
                        std::size_t t, std::size_t horizon, EncodeArm&& encode_arm) {
  check_horizon(commands, t, horizon);
  ActionChunk chunk{kind, {}};
  chunk.steps.reserve(horizon);
  for (std::size_t s = t; s < t + horizon; ++s) {
    chunk.steps.push_back(ActionStep{encode_arm(ArmSide::Left, commands[s].left),
                                     encode_arm(ArmSide::Right, commands[s].right)});
  }
  return chunk;
}

void expect_kind(const ActionChunk& chunk, RepresentationKind expected) {
  if (chunk.kind != expected) {
    throw Error(ErrorCode::KindMismatch, "chunk is " + std::string(to_string(chunk.kind)) +
                                             ", decoder expects " +
                                             std::string(to_string(expected)));
  }
}

}  // namespace

ActionChunk encode_camera_centric(std::span<const DualCommand> commands, std::size_t t,
                                  std::size_t horizon) {
  return encode_with(RepresentationKind::CameraCentric, commands, t, horizon,
                     [](ArmSide, const GripperState& cmd) {
                       return ArmAction{RepresentationKind::CameraCentric, cmd.pose, cmd.jaw};
                     });
}

ActionChunk encode_tool_centric(const Proprioception& x_t, std::span<const DualCommand> commands,
                                std::size_t t, std::size_t horizon) {
  return encode_with(RepresentationKind::ToolCentric, commands, t, horizon,
                     [&](ArmSide side, const GripperState& cmd) {
                       return ArmAction{RepresentationKind::ToolCentric,
                                        subtract_se3(x_t.arms[side].pose, cmd.pose), cmd.jaw};
                     });
}

ActionChunk encode_hybrid(const Proprioception& x_t, std::span<const DualCommand> commands,
                          std::size_t t, std::size_t horizon) {
  return encode_with(RepresentationKind::HybridRelative, commands, t, horizon,
                     [&](ArmSide side, const GripperState& cmd) {
                       return ArmAction{RepresentationKind::HybridRelative,
                                        subtract_hybrid(x_t.arms[side].pose, cmd.pose), cmd.jaw};
                     });
}

ActionChunk encode(RepresentationKind kind, const Proprioception& x_t,
                   std::span<const DualCommand> commands, std::size_t t, std::size_t horizon) {
  switch (kind) {
    case RepresentationKind::CameraCentric: return encode_camera_centric(commands, t, horizon);
    case RepresentationKind::ToolCentric: return encode_tool_centric(x_t, commands, t, horizon);
    case RepresentationKind::HybridRelative: return encode_hybrid(x_t, commands, t, horizon);
  }
  throw Error(ErrorCode::InvalidParameter, "unknown representation");
}

GripperState decode_arm(const ArmAction& action, const Pose& reference) {
  switch (action.kind) {
    case RepresentationKind::CameraCentric: return {action.pose(), action.jaw};
    case RepresentationKind::ToolCentric: return {compose(reference, action.pose()), action.jaw};
    case RepresentationKind::HybridRelative:
      return {apply_hybrid(reference, action.delta()), action.jaw};
  }
  throw Error(ErrorCode::InvalidParameter, "unknown representation");
}

std::vector<DualCommand> decode(const ActionChunk& chunk, const Proprioception& x_t) {
  std::vector<DualCommand> out;
  out.reserve(chunk.steps.size());
  for (const ActionStep& step : chunk.steps) {
    if (step.left.kind != chunk.kind || step.right.kind != chunk.kind) {
      throw Error(ErrorCode::KindMismatch, "chunk contains actions of mixed kinds");
    }
    out.push_back(DualCommand{decode_arm(step.left, x_t.arms.left.pose),
                              decode_arm(step.right, x_t.arms.right.pose)});
  }
  return out;
}

std::vector<DualCommand> decode_camera_centric(const ActionChunk& chunk,
                                               const Proprioception& x_t) {
  expect_kind(chunk, RepresentationKind::CameraCentric);
  return decode(chunk, x_t);
}

std::vector<DualCommand> decode_tool_centric(const ActionChunk& chunk, const Proprioception& x_t) {
  expect_kind(chunk, RepresentationKind::ToolCentric);
  return decode(chunk, x_t);
}

std::vector<DualCommand> decode_hybrid(const ActionChunk& chunk, const Proprioception& x_t) {
  expect_kind(chunk, RepresentationKind::HybridRelative);
  return decode(chunk, x_t);
}

namespace {

void write_arm(const ArmAction& a, std::span<double, kArmDims> out) {
  const bool hybrid = a.kind == RepresentationKind::HybridRelative;
  const Vec3& p = hybrid ? a.delta().dp : a.pose().p();
  const Rotation3& r = hybrid ? a.delta().dR : a.pose().R();
  const Rot6D six = rot_to_6d(r);
  out[0] = p.x();
  out[1] = p.y();
  out[2] = p.z();
  for (std::size_t i = 0; i < 6; ++i) out[3 + i] = six.v[i];
  out[9] = a.jaw;
}

ArmAction read_arm(std::span<const double, kArmDims> in, RepresentationKind kind) {
  const Vec3 p(in[0], in[1], in[2]);
  Rot6D six;
  for (std::size_t i = 0; i < 6; ++i) six.v[i] = in[3 + i];
  const Rotation3 r = sixd_to_rot(six);
  if (kind == RepresentationKind::HybridRelative) {
    if (!p.allFinite()) throw Error(ErrorCode::NonFinite, "action translation is non-finite");
    return ArmAction{kind, HybridDelta{p, r}, in[9]};
  }
  return ArmAction{kind, Pose(p, r), in[9]};
}

}  // namespace

ActionVector20 to_action_vector(const ActionStep& step) {
  ActionVector20 v{};
  write_arm(step.left, std::span<double, kArmDims>(v.data(), kArmDims));
  write_arm(step.right, std::span<double, kArmDims>(v.data() + kArmDims, kArmDims));
  return v;
}

ActionStep from_action_vector(const ActionVector20& v, RepresentationKind kind) {
  return ActionStep{read_arm(std::span<const double, kArmDims>(v.data(), kArmDims), kind),
                    read_arm(std::span<const double, kArmDims>(v.data() + kArmDims, kArmDims),
                             kind)};
}

}  // namespace relact
