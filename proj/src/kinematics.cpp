#include "relact/kinematics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "relact/error.hpp"

namespace relact {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ b);
}

std::string_view to_string(ManipulatorId id) {
  switch (id) {
    case ManipulatorId::ECM: return "ECM";
    case ManipulatorId::PSM1: return "PSM1";
    case ManipulatorId::PSM2: return "PSM2";
  }
  return "unknown";
}

ManipulatorId parse_manipulator(std::string_view name) {
  for (ManipulatorId id : kManipulators) {
    if (name == to_string(id)) return id;
  }
  throw Error(ErrorCode::InvalidParameter, "unknown manipulator '" + std::string(name) + "'");
}

Pose joint_motion(const JointDescriptor& joint, double value) {
  if (joint.type == JointType::Revolute) {
    return Pose::rotation(Rotation3::about_axis(joint.axis, value));
  }
  return Pose::translation(joint.axis * value);
}

std::size_t Manipulator::setup_count() const {
  std::size_t n = 0;
  while (n < joints.size() && joints[n].actuation == Actuation::PassiveSetup) ++n;
  return n;
}

void KinematicChain::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParameter, msg); };
  for (std::size_t i = 0; i < manipulators.size(); ++i) {
    const Manipulator& m = manipulators[i];
    const std::string name(to_string(m.id));
    if (static_cast<std::size_t>(m.id) != i) fail("manipulator " + name + " out of order");
    const std::size_t setup = m.setup_count();
    if (setup == 0) fail(name + " has no passive setup joint");
    if (setup == m.joints.size()) fail(name + " has no active joint");
    for (std::size_t j = 0; j < m.joints.size(); ++j) {
      const JointDescriptor& joint = m.joints[j];
      const std::string where = name + " joint " + std::to_string(j);
      if (j >= setup && joint.actuation == Actuation::PassiveSetup) {
        fail(where + ": setup joints must precede active joints");
      }
      if (!joint.axis.allFinite() || std::abs(joint.axis.norm() - 1.0) > 1e-9) {
        fail(where + ": axis is not unit length");
      }
      if (!(joint.potentiometer_sigma >= 0.0) || !std::isfinite(joint.potentiometer_sigma)) {
        fail(where + ": potentiometer sigma must be finite and >= 0");
      }
    }
  }
  if (!(max_fk_error_mm > 0.0)) fail("max_fk_error_mm must be > 0");
  if (!(workspace_half_extent_mm > 0.0)) fail("workspace_half_extent_mm must be > 0");
  if (!(jaw.min <= jaw.max)) fail("jaw limits are inverted");
}

namespace {

constexpr double kSetupSigmaPrismatic = 2.0;
constexpr double kSetupSigmaRevolute = 0.01;
// sqrt(3) * 0.57735 mm = 1 mm RMS translation error at the tool.
constexpr double kActiveSigmaPrismatic = 0.5773502691896258;
constexpr double kActiveSigmaRevolute = 0.0;

JointDescriptor setup_joint(JointType type, const Pose& offset) {
  return {type, Vec3::UnitZ(), offset, Actuation::PassiveSetup,
          type == JointType::Prismatic ? kSetupSigmaPrismatic : kSetupSigmaRevolute};
}

void add_active_joints(Manipulator& m, double prismatic_sigma, double revolute_sigma) {
  for (const Vec3& axis : {Vec3(Vec3::UnitX()), Vec3(Vec3::UnitY()), Vec3(Vec3::UnitZ())}) {
    m.joints.push_back({JointType::Prismatic, axis, Pose{}, Actuation::Active, prismatic_sigma});
  }
  for (const Vec3& axis : {Vec3(Vec3::UnitZ()), Vec3(Vec3::UnitY()), Vec3(Vec3::UnitX())}) {
    m.joints.push_back({JointType::Revolute, axis, Pose{}, Actuation::Active, revolute_sigma});
  }
}

Manipulator make_psm(ManipulatorId id, double side) {
  Manipulator m;
  m.id = id;
  m.base = Pose::translation(side * 1600.0, -1400.0, 0.0);
  m.joints.push_back(setup_joint(JointType::Prismatic, Pose::translation(0.0, 0.0, 50.0)));
  m.joints.push_back(setup_joint(JointType::Revolute, Pose::translation(-side * 1000.0, 0.0, 0.0)));
  m.joints.push_back(setup_joint(JointType::Revolute, Pose::translation(-side * 560.0, 1400.0, 0.0)));
  add_active_joints(m, kActiveSigmaPrismatic, kActiveSigmaRevolute);
  return m;
}

}  // namespace

KinematicChain default_chain() {
  KinematicChain chain;
  Manipulator ecm;
  ecm.id = ManipulatorId::ECM;
  ecm.base = Pose::translation(0.0, -400.0, 0.0);
  ecm.joints.push_back(setup_joint(JointType::Prismatic, Pose::translation(0.0, 0.0, 250.0)));
  ecm.joints.push_back(setup_joint(JointType::Revolute, Pose::translation(0.0, 400.0, 0.0)));
  ecm.joints.push_back(setup_joint(JointType::Revolute, Pose{}));
  add_active_joints(ecm, 0.0, 0.0);
  // Camera looks down the world -z axis from 150 mm above the table.
  ecm.tool_offset = Pose(Vec3(0.0, 0.0, -100.0), Rotation3::rot_x(std::numbers::pi));
  chain[ManipulatorId::ECM] = std::move(ecm);
  chain[ManipulatorId::PSM1] = make_psm(ManipulatorId::PSM1, -1.0);
  chain[ManipulatorId::PSM2] = make_psm(ManipulatorId::PSM2, 1.0);
  return chain;
}

KinematicChain zero_noise_chain() {
  KinematicChain chain = default_chain();
  for (Manipulator& m : chain.manipulators) {
    for (JointDescriptor& j : m.joints) j.potentiometer_sigma = 0.0;
  }
  return chain;
}

KinematicChain without_active_noise(KinematicChain chain) {
  for (Manipulator& m : chain.manipulators) {
    for (JointDescriptor& j : m.joints) {
      if (j.actuation == Actuation::Active) j.potentiometer_sigma = 0.0;
    }
  }
  return chain;
}

Pose forward_kinematics(const Manipulator& m, std::span<const double> joint_values) {
  if (joint_values.size() != m.joints.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(to_string(m.id)) + " expects " + std::to_string(m.joints.size()) +
                    " joint values, got " + std::to_string(joint_values.size()));
  }
  Pose g = m.base;
  for (std::size_t i = 0; i < m.joints.size(); ++i) {
    g = g * joint_motion(m.joints[i], joint_values[i]) * m.joints[i].link_offset;
  }
  return g * m.tool_offset;
}

Pose setup_segment_pose(const Manipulator& m, std::span<const double> setup_values) {
  const std::size_t n = m.setup_count();
  if (setup_values.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, std::string(to_string(m.id)) + " expects " +
                                                  std::to_string(n) + " setup values");
  }
  Pose g = m.base;
  for (std::size_t i = 0; i < n; ++i) {
    g = g * joint_motion(m.joints[i], setup_values[i]) * m.joints[i].link_offset;
  }
  return g;
}

Pose active_segment_pose(const Manipulator& m, std::span<const double> active_values) {
  const std::size_t first = m.setup_count();
  if (active_values.size() != m.joints.size() - first) {
    throw Error(ErrorCode::DimensionMismatch, std::string(to_string(m.id)) + " expects " +
                                                  std::to_string(m.joints.size() - first) +
                                                  " active values");
  }
  Pose g;
  for (std::size_t i = first; i < m.joints.size(); ++i) {
    g = g * joint_motion(m.joints[i], active_values[i - first]) * m.joints[i].link_offset;
  }
  return g * m.tool_offset;
}

double active_noise_floor_mm(const Manipulator& m) {
  double sum = 0.0;
  for (std::size_t i = m.setup_count(); i < m.joints.size(); ++i) {
    const JointDescriptor& j = m.joints[i];
    if (j.type == JointType::Prismatic) sum += j.potentiometer_sigma * j.potentiometer_sigma;
  }
  return std::sqrt(sum);
}

Pose base_error_of(const Manipulator& m, std::span<const double> true_setup,
                   std::span<const double> measured_setup) {
  return setup_segment_pose(m, true_setup) * inverse(setup_segment_pose(m, measured_setup));
}

namespace {

constexpr int kMaxPotentiometerDraws = 1000;

double gaussian(Rng& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(rng);
}

// Fresh potentiometer readings for the setup joints, redrawn until the
// resulting base error respects max_fk_error_mm.
void read_potentiometers(const KinematicChain& chain, const Manipulator& m,
                         ManipulatorState& state, Rng& rng) {
  const std::size_t n = m.setup_count();
  for (int attempt = 0; attempt < kMaxPotentiometerDraws; ++attempt) {
    state.measured_setup.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      state.measured_setup[i] = state.true_setup[i] + gaussian(rng, m.joints[i].potentiometer_sigma);
    }
    state.base_error = base_error_of(m, state.true_setup, state.measured_setup);
    if (state.base_error.p().norm() <= chain.max_fk_error_mm) return;
  }
  throw Error(ErrorCode::InvalidParameter,
              std::string(to_string(m.id)) +
                  ": potentiometer sigma too large for max_fk_error_mm");
}

}  // namespace

RobotConfiguration make_configuration(const KinematicChain& chain, std::uint64_t seed) {
  chain.validate();
  Rng rng(derive_seed(seed, 0x5e7u));
  RobotConfiguration config;
  for (ManipulatorId id : kManipulators) {
    const Manipulator& m = chain[id];
    ManipulatorState& st = config[id];
    st.true_setup.assign(m.setup_count(), 0.0);
    st.active.assign(m.active_count(), 0.0);
    read_potentiometers(chain, m, st, rng);
  }
  config.rng_seed = derive_seed(seed, 0xac7u);
  return config;
}

RobotConfiguration perturb_setup_joints(const KinematicChain& chain,
                                        const RobotConfiguration& config, ManipulatorId id,
                                        std::span<const double> delta_joints, Rng& rng) {
  const Manipulator& m = chain[id];
  if (delta_joints.size() != m.joints.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "delta has " + std::to_string(delta_joints.size()) + " entries, " +
                    std::string(to_string(id)) + " has " + std::to_string(m.joints.size()) +
                    " joints");
  }
  const std::size_t n = m.setup_count();
  for (std::size_t i = n; i < delta_joints.size(); ++i) {
    if (delta_joints[i] != 0.0) {
      throw Error(ErrorCode::ActiveJointPerturbation,
                  "delta targets active joint " + std::to_string(i));
    }
  }
  RobotConfiguration next = config;
  ManipulatorState& st = next[id];
  for (std::size_t i = 0; i < n; ++i) st.true_setup[i] += delta_joints[i];
  read_potentiometers(chain, m, st, rng);
  next.rng_seed = rng();
  return next;
}

Pose tool_pose(const KinematicChain& chain, const RobotConfiguration& config, ManipulatorId id,
               FrameSource use) {
  const ManipulatorState& st = config[id];
  const auto& setup = use == FrameSource::True ? st.true_setup : st.measured_setup;
  const Manipulator& m = chain[id];
  return setup_segment_pose(m, setup) * active_segment_pose(m, st.active);
}

Pose endoscope_tip_frame(const KinematicChain& chain, const RobotConfiguration& config,
                         FrameSource use) {
  return tool_pose(chain, config, ManipulatorId::ECM, use);
}

namespace {

Pose active_joint_error(const Manipulator& m, std::uint64_t seed) {
  Rng rng(seed);
  Pose delta;
  for (std::size_t i = m.setup_count(); i < m.joints.size(); ++i) {
    const JointDescriptor& j = m.joints[i];
    delta = delta * joint_motion(j, gaussian(rng, j.potentiometer_sigma));
  }
  return delta;
}

bool has_active_noise(const Manipulator& m) {
  for (std::size_t i = m.setup_count(); i < m.joints.size(); ++i) {
    if (m.joints[i].potentiometer_sigma > 0.0) return true;
  }
  return false;
}

}  // namespace

ServoResult servo_to(const KinematicChain& chain, const RobotConfiguration& config,
                     ManipulatorId id, const Pose& commanded_world_pose,
                     std::optional<std::uint64_t> noise_key) {
  const Manipulator& m = chain[id];
  const ManipulatorState& st = config[id];
  const Pose setup_measured = setup_segment_pose(m, st.measured_setup);
  const Vec3 local = (inverse(setup_measured) * commanded_world_pose).p();
  if ((local.cwiseAbs().array() > chain.workspace_half_extent_mm).any()) {
    throw Error(ErrorCode::Unreachable,
                std::string(to_string(id)) + " command leaves the active workspace (local " +
                    std::to_string(local.x()) + ", " + std::to_string(local.y()) + ", " +
                    std::to_string(local.z()) + " mm)");
  }
  ServoResult result;
  result.measured_pose = commanded_world_pose;
  result.achieved_true_pose = st.base_error * commanded_world_pose;
  if (noise_key && has_active_noise(m)) {
    const auto stream = static_cast<std::uint64_t>(id);
    result.achieved_true_pose =
        result.achieved_true_pose *
        active_joint_error(m, derive_seed(config.rng_seed, stream, *noise_key));
  }
  const double dp = (result.measured_pose.p() - commanded_world_pose.p()).cwiseAbs().maxCoeff();
  const double dr = max_abs_diff(result.measured_pose.R(), commanded_world_pose.R());
  result.converged = dp <= kServoTranslationTolerance && dr <= kServoRotationTolerance;
  return result;
}

Proprioception proprioception(const KinematicChain& chain, const RobotConfiguration& config,
                              DualArm<double> jaw, double timestamp) {
  DualArm<GripperState> world;
  for (ArmSide side : kArms) {
    world[side] = {tool_pose(chain, config, psm_for(side), FrameSource::Measured), jaw[side]};
  }
  return proprioception_from(chain, config, world, timestamp);
}

Proprioception proprioception_from(const KinematicChain& chain, const RobotConfiguration& config,
                                   const DualArm<GripperState>& measured_world, double timestamp) {
  const Pose camera_inv = inverse(endoscope_tip_frame(chain, config, FrameSource::Measured));
  Proprioception x;
  x.timestamp = timestamp;
  for (ArmSide side : kArms) {
    x.arms[side] = {camera_inv * measured_world[side].pose, measured_world[side].jaw};
  }
  return x;
}

}  // namespace relact
