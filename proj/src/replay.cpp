#include "relact/replay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <sstream>

#include "relact/error.hpp"

namespace relact {

using nlohmann::json;

std::vector<Pose> generate_lemniscate(double scale_mm, std::size_t num_points, const Pose& center) {
  if (!(scale_mm > 0.0) || !std::isfinite(scale_mm)) {
    throw Error(ErrorCode::InvalidParameter, "lemniscate scale must be > 0 mm");
  }
  if (num_points < 8) throw Error(ErrorCode::InvalidParameter, "lemniscate needs >= 8 points");
  std::vector<Pose> path;
  path.reserve(num_points);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(num_points - 1);
  for (std::size_t k = 0; k < num_points; ++k) {
    const double th = step * static_cast<double>(k);
    const Vec3 local(scale_mm * std::cos(th), scale_mm * std::sin(th) * std::cos(th), 0.0);
    path.emplace_back(center * local, center.R());
  }
  return path;
}

namespace {

void require_commands(std::span<const DualCommand> commands) {
  if (commands.empty()) throw Error(ErrorCode::InvalidParameter, "empty command sequence");
}

}  // namespace

ReferenceTrajectory record_reference(const KinematicChain& chain, const RobotConfiguration& config,
                                     std::span<const DualCommand> commands, double dt) {
  require_commands(commands);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidParameter, "dt must be > 0");
  const Pose camera = endoscope_tip_frame(chain, config, FrameSource::Measured);

  ReferenceTrajectory ref;
  ref.commands.assign(commands.begin(), commands.end());
  ref.dt = dt;
  DualArm<GripperState> believed;
  for (ArmSide side : kArms) {
    const ServoResult r = servo_to(chain, config, psm_for(side), camera * commands[0][side].pose);
    ref.initial_true_pose[side] = r.achieved_true_pose;
    believed[side] = {r.measured_pose, commands[0][side].jaw};
  }
  for (std::size_t k = 0; k < commands.size(); ++k) {
    ref.proprioception.push_back(
        proprioception_from(chain, config, believed, static_cast<double>(k) * dt));
    for (ArmSide side : kArms) {
      const ServoResult r =
          servo_to(chain, config, psm_for(side), camera * commands[k][side].pose, k);
      ref.true_path[side].push_back(r.achieved_true_pose.p());
      believed[side] = {r.measured_pose, commands[k][side].jaw};
    }
  }
  return ref;
}

double dual_rmse(const DualPath& a, const DualPath& b) {
  std::vector<Vec3> pa(a.left);
  pa.insert(pa.end(), a.right.begin(), a.right.end());
  std::vector<Vec3> pb(b.left);
  pb.insert(pb.end(), b.right.begin(), b.right.end());
  return rmse(pa, pb);
}

ReplayResult replay(const KinematicChain& chain, const ReferenceTrajectory& reference,
                    RepresentationKind kind, const RobotConfiguration& config,
                    std::size_t chunk_size) {
  require_commands(reference.commands);
  if (chunk_size == 0) throw Error(ErrorCode::InvalidParameter, "chunk size must be >= 1");
  const std::size_t n = reference.commands.size();
  if (reference.proprioception.size() != n) {
    throw Error(ErrorCode::LengthMismatch, "reference has not been recorded");
  }
  const Pose camera = endoscope_tip_frame(chain, config, FrameSource::Measured);

  // The experimenter puts the grippers back where they physically started.
  DualArm<GripperState> believed;
  for (ArmSide side : kArms) {
    const ManipulatorId id = psm_for(side);
    const ServoResult r =
        servo_to(chain, config, id, inverse(config[id].base_error) * reference.initial_true_pose[side]);
    believed[side] = {r.measured_pose, reference.commands[0][side].jaw};
  }

  ReplayResult result;
  for (std::size_t t0 = 0; t0 < n; t0 += chunk_size) {
    const std::size_t horizon = std::min(chunk_size, n - t0);
    const ActionChunk chunk =
        encode(kind, reference.proprioception[t0], reference.commands, t0, horizon);
    const Proprioception live =
        proprioception_from(chain, config, believed, static_cast<double>(t0) * reference.dt);
    const std::vector<DualCommand> decoded = decode(chunk, live);
    for (std::size_t s = 0; s < horizon; ++s) {
      for (ArmSide side : kArms) {
        const ServoResult r =
            servo_to(chain, config, psm_for(side), camera * decoded[s][side].pose, t0 + s);
        result.path[side].push_back(r.achieved_true_pose.p());
        believed[side] = {r.measured_pose, decoded[s][side].jaw};
      }
    }
  }
  result.rmse_mm = dual_rmse(result.path, reference.true_path);
  return result;
}

const ReplayCell& ReplayReport::at(RepresentationKind kind, std::string_view label) const {
  for (const ReplayCell& c : cells) {
    if (c.kind == kind && c.config_label == label) return c;
  }
  throw Error(ErrorCode::InvalidParameter,
              "no cell for " + std::string(to_string(kind)) + " / " + std::string(label));
}

namespace {

ReplayReport report_skeleton(const ReferenceTrajectory& reference,
                             std::span<const LabeledConfiguration> configs,
                             std::span<const RepresentationKind> kinds, std::uint64_t seed) {
  if (configs.empty()) throw Error(ErrorCode::InvalidParameter, "no configurations to replay");
  if (kinds.empty()) throw Error(ErrorCode::InvalidParameter, "no representations to replay");
  ReplayReport report;
  report.seed = seed;
  report.num_points = reference.true_path.left.size() + reference.true_path.right.size();
  report.reference_path = reference.true_path;
  for (RepresentationKind k : kAllKinds) {
    if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) report.kinds.push_back(k);
  }
  for (const LabeledConfiguration& c : configs) report.config_labels.push_back(c.label);
  for (RepresentationKind k : report.kinds) {
    for (const LabeledConfiguration& c : configs) report.cells.push_back({k, c.label, {}, 0.0});
  }
  return report;
}

void fill_cell(const KinematicChain& chain, const ReferenceTrajectory& reference,
               std::span<const LabeledConfiguration> configs, std::size_t chunk_size,
               ReplayCell& cell) {
  const auto it = std::find_if(configs.begin(), configs.end(),
                               [&](const LabeledConfiguration& c) { return c.label == cell.config_label; });
  ReplayResult r = replay(chain, reference, cell.kind, it->config, chunk_size);
  cell.path = std::move(r.path);
  cell.rmse_mm = r.rmse_mm;
}

}  // namespace

ReplayReport run_experiment(const KinematicChain& chain, const ReferenceTrajectory& reference,
                            std::span<const LabeledConfiguration> configs,
                            std::span<const RepresentationKind> kinds, std::uint64_t seed,
                            std::size_t chunk_size) {
  ReplayReport report = report_skeleton(reference, configs, kinds, seed);
  const auto count = static_cast<std::ptrdiff_t>(report.cells.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      fill_cell(chain, reference, configs, chunk_size, report.cells[static_cast<std::size_t>(i)]);
    } catch (...) {
#pragma omp critical(relact_replay_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return report;
}

namespace serial {

ReplayReport run_experiment(const KinematicChain& chain, const ReferenceTrajectory& reference,
                            std::span<const LabeledConfiguration> configs,
                            std::span<const RepresentationKind> kinds, std::uint64_t seed,
                            std::size_t chunk_size) {
  ReplayReport report = report_skeleton(reference, configs, kinds, seed);
  for (ReplayCell& cell : report.cells) fill_cell(chain, reference, configs, chunk_size, cell);
  return report;
}

}  // namespace serial

double report_consistency_error(const ReplayReport& report) {
  double worst = 0.0;
  for (const ReplayCell& c : report.cells) {
    worst = std::max(worst, std::abs(dual_rmse(c.path, report.reference_path) - c.rmse_mm));
  }
  return worst;
}

// --- standard experiment ------------------------------------------------------

std::vector<DualCommand> lemniscate_commands(const ExperimentParams& params) {
  const std::vector<Pose> left =
      generate_lemniscate(params.scale_mm, params.num_points, Pose::translation(params.left_center));
  const std::vector<Pose> right =
      generate_lemniscate(params.scale_mm, params.num_points, Pose::translation(params.right_center));
  std::vector<DualCommand> commands;
  commands.reserve(left.size());
  for (std::size_t k = 0; k < left.size(); ++k) {
    // Slow jaw open/close cycle inside the default jaw limits.
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) /
                         static_cast<double>(left.size() - 1);
    const double jaw = 0.5 + 0.3 * std::sin(phase);
    commands.push_back({{left[k], jaw}, {right[k], jaw}});
  }
  return commands;
}

std::vector<LabeledConfiguration> standard_configurations(const KinematicChain& chain,
                                                          std::uint64_t seed,
                                                          double eval_shift_rad) {
  const RobotConfiguration ref = make_configuration(chain, seed);
  Rng rng(derive_seed(seed, 0xe7a1u));
  auto shifted = [&](double first, double second) {
    RobotConfiguration c = ref;
    for (ManipulatorId id : {ManipulatorId::PSM1, ManipulatorId::PSM2}) {
      const Manipulator& m = chain[id];
      std::vector<double> delta(m.joints.size(), 0.0);
      int used = 0;
      for (std::size_t j = 0; j < m.setup_count() && used < 2; ++j) {
        if (m.joints[j].type != JointType::Revolute) continue;
        delta[j] = used == 0 ? first : second;
        ++used;
      }
      c = perturb_setup_joints(chain, c, id, delta, rng);
    }
    return c;
  };
  std::vector<LabeledConfiguration> out;
  out.push_back({"RefConfig", ref});
  out.push_back({"EvalConfig1", shifted(eval_shift_rad, -eval_shift_rad)});
  out.push_back({"EvalConfig2", shifted(-eval_shift_rad, eval_shift_rad)});
  return out;
}

DemonstrationRecord to_demonstration(const ReferenceTrajectory& reference, std::string task_name,
                                     json metadata) {
  if (reference.proprioception.size() != reference.commands.size()) {
    throw Error(ErrorCode::LengthMismatch, "reference has not been recorded");
  }
  DemonstrationRecord record;
  record.task_name = std::move(task_name);
  record.dt = reference.dt;
  record.metadata = std::move(metadata);
  for (std::size_t k = 0; k < reference.commands.size(); ++k) {
    record.steps.push_back(make_step(reference.proprioception[k], reference.commands[k]));
  }
  return record;
}

std::vector<DualCommand> demonstration_commands(const DemonstrationRecord& record) {
  std::vector<DualCommand> commands;
  commands.reserve(record.steps.size());
  for (std::size_t i = 0; i < record.steps.size(); ++i) {
    try {
      commands.push_back(step_command(record.steps[i]));
    } catch (const Error& e) {
      throw Error(ErrorCode::MalformedRecord, e.what(), i);
    }
  }
  return commands;
}

// --- report output -----------------------------------------------------------

namespace {

json path_to_json(const std::vector<Vec3>& path) {
  json out = json::array();
  for (const Vec3& p : path) out.push_back({p.x(), p.y(), p.z()});
  return out;
}

json dual_path_to_json(const DualPath& path) {
  return json{{"left", path_to_json(path.left)}, {"right", path_to_json(path.right)}};
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string_view row_title(RepresentationKind kind) {
  switch (kind) {
    case RepresentationKind::CameraCentric: return "Camera-centric";
    case RepresentationKind::ToolCentric: return "Tool-centric";
    case RepresentationKind::HybridRelative: return "Hybrid-relative";
  }
  return "";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string path_csv(const DualPath& path) {
  std::ostringstream os;
  os << "step,arm,x_mm,y_mm,z_mm\n";
  for (ArmSide side : kArms) {
    const auto& pts = path[side];
    for (std::size_t i = 0; i < pts.size(); ++i) {
      os << i << ',' << (side == ArmSide::Left ? "left" : "right") << ','
         << fmt("%.17g", pts[i].x()) << ',' << fmt("%.17g", pts[i].y()) << ','
         << fmt("%.17g", pts[i].z()) << '\n';
    }
  }
  return os.str();
}

}  // namespace

json report_to_json(const ReplayReport& report) {
  json kinds = json::array();
  for (RepresentationKind k : report.kinds) kinds.push_back(std::string(to_string(k)));
  json cells = json::array();
  for (const ReplayCell& c : report.cells) {
    cells.push_back({{"kind", std::string(to_string(c.kind))},
                     {"config_label", c.config_label},
                     {"rmse_mm", c.rmse_mm},
                     {"num_points", report.num_points},
                     {"path", dual_path_to_json(c.path)}});
  }
  return json{{"schema", std::string(kReportSchema)},
              {"seed", report.seed},
              {"num_points", report.num_points},
              {"kinds", kinds},
              {"config_labels", report.config_labels},
              {"reference_path", dual_path_to_json(report.reference_path)},
              {"cells", cells}};
}

std::string report_table_csv(const ReplayReport& report) {
  std::ostringstream os;
  os << "kind,config_label,rmse_mm,num_points,seed\n";
  for (const ReplayCell& c : report.cells) {
    os << to_string(c.kind) << ',' << c.config_label << ',' << fmt("%.17g", c.rmse_mm) << ','
       << report.num_points << ',' << report.seed << '\n';
  }
  return os.str();
}

std::string report_text_table(const ReplayReport& report) {
  std::ostringstream os;
  os << "Trajectory tracking RMSE (mm)\n";
  os << std::string(16, ' ');
  for (const std::string& label : report.config_labels) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " %14s", label.c_str());
    os << buf;
  }
  os << '\n';
  for (RepresentationKind k : report.kinds) {
    char title[32];
    std::snprintf(title, sizeof title, "%-16s", std::string(row_title(k)).c_str());
    os << title;
    for (const std::string& label : report.config_labels) {
      os << fmt(" %14.4f", report.at(k, label).rmse_mm);
    }
    os << '\n';
  }
  return os.str();
}

void write_report(const ReplayReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "paths", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
  write_text(out_dir / "report.json", report_to_json(report).dump(1) + "\n");
  write_text(out_dir / "rmse_table.csv", report_table_csv(report));
  write_text(out_dir / "paths" / "reference.csv", path_csv(report.reference_path));
  for (const ReplayCell& c : report.cells) {
    write_text(out_dir / "paths" / (std::string(to_string(c.kind)) + "_" + c.config_label + ".csv"),
               path_csv(c.path));
  }
}

}  // namespace relact
