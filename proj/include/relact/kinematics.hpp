#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "relact/action_repr.hpp"
#include "relact/se3.hpp"

namespace relact {

using Rng = std::mt19937_64;

/// splitmix64-style mixing of a seed with stream identifiers.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

enum class JointType { Revolute, Prismatic };
enum class Actuation { PassiveSetup, Active };
enum class FrameSource { True, Measured };
enum class ManipulatorId { ECM = 0, PSM1 = 1, PSM2 = 2 };
inline constexpr std::array<ManipulatorId, 3> kManipulators = {
    ManipulatorId::ECM, ManipulatorId::PSM1, ManipulatorId::PSM2};

std::string_view to_string(ManipulatorId id);
ManipulatorId parse_manipulator(std::string_view name);

/// Left gripper is driven by PSM1, right by PSM2.
inline ManipulatorId psm_for(ArmSide side) {
  return side == ArmSide::Left ? ManipulatorId::PSM1 : ManipulatorId::PSM2;
}

struct JointDescriptor {
  JointType type = JointType::Revolute;
  Vec3 axis = Vec3::UnitZ();
  Pose link_offset;  // applied after the joint motion
  Actuation actuation = Actuation::Active;
  double potentiometer_sigma = 0.0;  // rad or mm
};

/// Pure joint motion: rotation about or translation along the axis.
Pose joint_motion(const JointDescriptor& joint, double value);

struct Manipulator {
  ManipulatorId id = ManipulatorId::ECM;
  Pose base;  // mounting transform in the shared world frame
  std::vector<JointDescriptor> joints;  // setup joints first, then active
  Pose tool_offset;

  std::size_t setup_count() const;
  std::size_t active_count() const { return joints.size() - setup_count(); }
};

struct KinematicChain {
  std::array<Manipulator, 3> manipulators;
  double max_fk_error_mm = 50.0;
  double workspace_half_extent_mm = 200.0;
  JawLimits jaw;

  const Manipulator& operator[](ManipulatorId id) const {
    return manipulators[static_cast<std::size_t>(id)];
  }
  Manipulator& operator[](ManipulatorId id) { return manipulators[static_cast<std::size_t>(id)]; }

  /// Throws InvalidParameter on any violated descriptor invariant.
  void validate() const;
};

/// ECM plus two PSMs: three passive setup joints (prismatic-Z, revolute-Z,
/// revolute-Z) and six active joints (prismatic XYZ, revolute ZYX) each.
/// Setup potentiometer sigma 2 mm / 0.01 rad; PSM active prismatic sigma
/// chosen for a 1 mm translation noise floor.
KinematicChain default_chain();
/// default_chain() with every potentiometer sigma set to zero.
KinematicChain zero_noise_chain();
/// default_chain() with active-joint sigmas zeroed, setup noise kept.
KinematicChain without_active_noise(KinematicChain chain);

/// World-frame tool pose; throws DimensionMismatch on a wrong value count.
Pose forward_kinematics(const Manipulator& m, std::span<const double> joint_values);
/// Base mount composed with the setup joints and their link offsets.
Pose setup_segment_pose(const Manipulator& m, std::span<const double> setup_values);
/// Active joints, their link offsets, and the tool offset.
Pose active_segment_pose(const Manipulator& m, std::span<const double> active_values);

/// RMS translation of the tool-frame error produced by active-joint noise.
double active_noise_floor_mm(const Manipulator& m);

struct ManipulatorState {
  std::vector<double> true_setup;
  std::vector<double> measured_setup;
  std::vector<double> active;
  Pose base_error;  // setup_true * inverse(setup_measured)
};

struct RobotConfiguration {
  std::array<ManipulatorState, 3> states;
  std::uint64_t rng_seed = 0;

  const ManipulatorState& operator[](ManipulatorId id) const {
    return states[static_cast<std::size_t>(id)];
  }
  ManipulatorState& operator[](ManipulatorId id) { return states[static_cast<std::size_t>(id)]; }
};

/// Setup joints at zero (true), potentiometer readings drawn for every
/// manipulator, active joints at zero.
RobotConfiguration make_configuration(const KinematicChain& chain, std::uint64_t seed);

/// Moves setup joints by delta (one entry per joint; active entries must be
/// zero) and re-reads all of the manipulator's potentiometers with fresh noise.
/// Draws whose base error exceeds max_fk_error_mm are redrawn.
RobotConfiguration perturb_setup_joints(const KinematicChain& chain,
                                        const RobotConfiguration& config, ManipulatorId id,
                                        std::span<const double> delta_joints, Rng& rng);

Pose base_error_of(const Manipulator& m, std::span<const double> true_setup,
                   std::span<const double> measured_setup);

Pose tool_pose(const KinematicChain& chain, const RobotConfiguration& config, ManipulatorId id,
               FrameSource use);
Pose endoscope_tip_frame(const KinematicChain& chain, const RobotConfiguration& config,
                         FrameSource use);

inline constexpr double kServoTranslationTolerance = 1e-6;
inline constexpr double kServoRotationTolerance = 1e-8;

struct ServoResult {
  Pose achieved_true_pose;
  Pose measured_pose;
  bool converged = false;
};

/// Drives the manipulator so its measured FK equals the world-frame command.
/// The true pose is base_error * command, times an active-joint error drawn
/// from (config.rng_seed, id, noise_key) when a key is given and the active
/// joints have nonzero sigma. Throws Unreachable when the active segment would
/// leave the workspace box.
ServoResult servo_to(const KinematicChain& chain, const RobotConfiguration& config,
                     ManipulatorId id, const Pose& commanded_world_pose,
                     std::optional<std::uint64_t> noise_key = std::nullopt);

/// Believed gripper poses in the endoscope-tip frame from the configuration's
/// own joint values.
Proprioception proprioception(const KinematicChain& chain, const RobotConfiguration& config,
                              DualArm<double> jaw = {0.0, 0.0}, double timestamp = 0.0);
/// Same, for believed world-frame tool poses held by a controller.
Proprioception proprioception_from(const KinematicChain& chain, const RobotConfiguration& config,
                                   const DualArm<GripperState>& measured_world,
                                   double timestamp = 0.0);

}  // namespace relact
