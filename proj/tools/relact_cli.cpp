// relact: generate reference demonstrations, replay them under base-frame
// errors, and convert demonstrations into training chunks.
//
// Exit status: 0 success, 1 findings (validate, convert --verify), 2 error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relact/chain_io.hpp"
#include "relact/dataset.hpp"
#include "relact/error.hpp"
#include "relact/replay.hpp"

namespace {

using namespace relact;
namespace fs = std::filesystem;

constexpr int kExitFindings = 1;
constexpr int kExitError = 2;
constexpr double kVerifyTolerance = 1e-9;

KinematicChain load_chain_or_default(const std::string& path) {
  return path.empty() ? default_chain() : load_chain(path);
}

std::vector<RepresentationKind> kinds_from(const std::string& text) {
  if (text == "all") return {kAllKinds.begin(), kAllKinds.end()};
  return {parse_kind(text)};
}

struct GenRefOptions {
  std::string chain;
  std::uint64_t seed = 0;
  double scale = 20.0;
  std::size_t points = 360;
  double dt = 0.01;
  std::string out;
};

int gen_ref(const GenRefOptions& o) {
  const KinematicChain chain = load_chain_or_default(o.chain);
  ExperimentParams params;
  params.scale_mm = o.scale;
  params.num_points = o.points;
  params.dt = o.dt;
  const RobotConfiguration config = make_configuration(chain, o.seed);
  const ReferenceTrajectory ref =
      record_reference(chain, config, lemniscate_commands(params), params.dt);
  const nlohmann::json meta{{"seed", o.seed},
                            {"scale_mm", o.scale},
                            {"chain", o.chain.empty() ? "default" : o.chain},
                            {"config", "RefConfig"}};
  save_demo(to_demonstration(ref, "lemniscate", meta), o.out);
  std::cout << "wrote " << ref.commands.size() << " steps to " << o.out << '\n';
  return 0;
}

struct ReplayOptions {
  std::string chain;
  std::string ref;
  std::uint64_t seed = 0;
  std::string kind = "all";
  std::size_t chunk_size = kDefaultChunkSize;
  double scale = 20.0;
  std::size_t points = 360;
  double shift = 0.1;
  std::string out;
};

int replay_cmd(const ReplayOptions& o) {
  const KinematicChain chain = load_chain_or_default(o.chain);
  ExperimentParams params;
  params.scale_mm = o.scale;
  params.num_points = o.points;
  std::vector<DualCommand> commands;
  double dt = params.dt;
  if (o.ref.empty()) {
    commands = lemniscate_commands(params);
  } else {
    const DemonstrationRecord rec = load_demo(o.ref);
    commands = demonstration_commands(rec);
    dt = rec.dt;
  }
  const std::vector<LabeledConfiguration> configs = standard_configurations(chain, o.seed, o.shift);
  const ReferenceTrajectory ref = record_reference(chain, configs.front().config, commands, dt);
  const std::vector<RepresentationKind> kinds = kinds_from(o.kind);
  const ReplayReport report = run_experiment(chain, ref, configs, kinds, o.seed, o.chunk_size);
  write_report(report, o.out);
  std::cout << report_text_table(report);
  return 0;
}

struct ConvertOptions {
  std::string in;
  std::string kind = "tool";
  std::size_t chunk_size = kDefaultChunkSize;
  std::string out;
  std::string stats;
  bool verify = false;
};

int convert(const ConvertOptions& o) {
  const DemonstrationRecord rec = load_demo(o.in);
  const ChunkSet set = export_chunks(rec, parse_kind(o.kind), o.chunk_size);
  save_chunks(set, o.out);
  std::cout << "wrote " << set.chunks.size() << " chunks to " << o.out << '\n';
  if (!o.stats.empty()) save_stats(compute_stats(set), o.stats);
  if (o.verify) {
    const double err = max_chunk_roundtrip_error(set, rec);
    std::printf("verify: max round-trip error %.3e\n", err);
    if (!(err <= kVerifyTolerance)) return kExitFindings;
  }
  return 0;
}

int validate_cmd(const std::string& in) {
  const DemonstrationRecord rec = load_demo(in);
  const std::vector<Finding> findings = validate(rec);
  for (const Finding& f : findings) {
    std::cout << "step " << f.step << " [" << f.category << "] " << f.message << '\n';
  }
  std::cout << rec.steps.size() << " steps, " << findings.size() << " findings\n";
  return findings.empty() ? 0 : kExitFindings;
}

int stats_cmd(const std::string& in, const std::string& out) {
  const NormalizationStats s = compute_stats(load_chunks(in));
  save_stats(s, out);
  std::cout << "stats over " << s.num_samples << " samples written to " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relact: relative action representations under kinematic base errors"};
  app.require_subcommand(1);

  GenRefOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-ref", "Record a lemniscate reference demonstration");
  gen_cmd->add_option("--chain", gen.chain, "Kinematic chain JSON (default: built-in)");
  gen_cmd->add_option("--seed", gen.seed, "Configuration seed")->required();
  gen_cmd->add_option("--scale", gen.scale, "Lemniscate half-width in mm")->capture_default_str();
  gen_cmd->add_option("--points", gen.points, "Number of trajectory points")->capture_default_str();
  gen_cmd->add_option("--dt", gen.dt, "Control period in s")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output demonstration (.jsonl)")->required();

  ReplayOptions rep;
  CLI::App* rep_cmd = app.add_subcommand("replay", "Replay a reference under three configurations");
  rep_cmd->add_option("--chain", rep.chain, "Kinematic chain JSON (default: built-in)");
  rep_cmd->add_option("--ref", rep.ref, "Reference demonstration (default: generated lemniscate)");
  rep_cmd->add_option("--seed", rep.seed, "Configuration seed")->required();
  rep_cmd->add_option("--kind", rep.kind, "camera|tool|hybrid|all")
      ->check(CLI::IsMember({"camera", "tool", "hybrid", "all"}))
      ->capture_default_str();
  rep_cmd->add_option("--chunk-size", rep.chunk_size, "Action chunk length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  rep_cmd->add_option("--scale", rep.scale, "Lemniscate half-width in mm")->capture_default_str();
  rep_cmd->add_option("--points", rep.points, "Number of trajectory points")->capture_default_str();
  rep_cmd->add_option("--shift", rep.shift, "Eval setup-joint shift in rad")->capture_default_str();
  rep_cmd->add_option("--out", rep.out, "Report directory")->required();

  ConvertOptions conv;
  CLI::App* conv_cmd = app.add_subcommand("convert", "Export a demonstration as action chunks");
  conv_cmd->add_option("--in", conv.in, "Demonstration (.jsonl)")->required()->check(CLI::ExistingFile);
  conv_cmd->add_option("--kind", conv.kind, "camera|tool|hybrid")
      ->check(CLI::IsMember({"camera", "tool", "hybrid"}))
      ->capture_default_str();
  conv_cmd->add_option("--chunk-size", conv.chunk_size, "Action chunk length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  conv_cmd->add_option("--out", conv.out, "Output chunks (.jsonl)")->required();
  conv_cmd->add_option("--stats", conv.stats, "Also write normalization stats here");
  conv_cmd->add_flag("--verify", conv.verify, "Decode every chunk and check the round trip");

  std::string validate_in;
  CLI::App* val_cmd = app.add_subcommand("validate", "Check a demonstration record");
  val_cmd->add_option("--in", validate_in, "Demonstration (.jsonl)")->required()->check(CLI::ExistingFile);

  std::string stats_in, stats_out;
  CLI::App* stats_sub = app.add_subcommand("stats", "Normalization statistics of a chunk file");
  stats_sub->add_option("--in", stats_in, "Chunk file (.jsonl)")->required()->check(CLI::ExistingFile);
  stats_sub->add_option("--out", stats_out, "Output stats (.json)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  try {
    if (*gen_cmd) return gen_ref(gen);
    if (*rep_cmd) return replay_cmd(rep);
    if (*conv_cmd) return convert(conv);
    if (*val_cmd) return validate_cmd(validate_in);
    if (*stats_sub) return stats_cmd(stats_in, stats_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
