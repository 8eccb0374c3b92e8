#include "relact/chain_io.hpp"

#include <fstream>
#include <string>

#include "relact/error.hpp"

namespace relact {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& msg) {
  throw Error(ErrorCode::MalformedRecord, "chain: " + msg);
}

Vec3 vec3_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) malformed(std::string(what) + " must be a 3-array");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) malformed(std::string(what) + " must be numeric");
    v[i] = j[i].get<double>();
  }
  return v;
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) malformed(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

json pose_to_json(const Pose& g) {
  json r = json::array();
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) r.push_back(g.R()(row, col));
  }
  return json{{"p", {g.p().x(), g.p().y(), g.p().z()}}, {"R", r}};
}

Pose pose_from_json(const json& j) {
  const Vec3 p = vec3_from_json(field(j, "p"), "p");
  const json& r = field(j, "R");
  if (!r.is_array() || r.size() != 9) malformed("R must be a 9-array (row-major)");
  Mat3 m;
  for (int i = 0; i < 9; ++i) {
    if (!r[i].is_number()) malformed("R must be numeric");
    m(i / 3, i % 3) = r[i].get<double>();
  }
  return Pose(p, Rotation3(m));
}

json chain_to_json(const KinematicChain& chain) {
  json manipulators = json::array();
  for (const Manipulator& m : chain.manipulators) {
    json joints = json::array();
    for (const JointDescriptor& jd : m.joints) {
      joints.push_back({{"type", jd.type == JointType::Revolute ? "revolute" : "prismatic"},
                        {"axis", {jd.axis.x(), jd.axis.y(), jd.axis.z()}},
                        {"offset", pose_to_json(jd.link_offset)},
                        {"actuation", jd.actuation == Actuation::Active ? "active" : "passive"},
                        {"sigma", jd.potentiometer_sigma}});
    }
    manipulators.push_back({{"name", std::string(to_string(m.id))},
                            {"base", pose_to_json(m.base)},
                            {"joints", joints},
                            {"tool_offset", pose_to_json(m.tool_offset)}});
  }
  return json{{"schema", std::string(kChainSchema)},
              {"max_fk_error_mm", chain.max_fk_error_mm},
              {"workspace_half_extent_mm", chain.workspace_half_extent_mm},
              {"jaw_limits", {chain.jaw.min, chain.jaw.max}},
              {"manipulators", manipulators}};
}

KinematicChain chain_from_json(const json& j) {
  const json& schema = field(j, "schema");
  if (!schema.is_string() || schema.get<std::string>() != kChainSchema) {
    throw Error(ErrorCode::SchemaVersionMismatch,
                "expected " + std::string(kChainSchema) + ", got " + schema.dump());
  }
  KinematicChain chain;
  chain.max_fk_error_mm = j.value("max_fk_error_mm", chain.max_fk_error_mm);
  chain.workspace_half_extent_mm = j.value("workspace_half_extent_mm", chain.workspace_half_extent_mm);
  if (j.contains("jaw_limits")) {
    const json& jl = j.at("jaw_limits");
    if (!jl.is_array() || jl.size() != 2) malformed("jaw_limits must be [min, max]");
    chain.jaw = {jl[0].get<double>(), jl[1].get<double>()};
  }
  const json& ms = field(j, "manipulators");
  if (!ms.is_array() || ms.size() != 3) malformed("expected exactly 3 manipulators");
  std::array<bool, 3> seen{};
  try {
    for (const json& mj : ms) {
      Manipulator m;
      m.id = parse_manipulator(field(mj, "name").get<std::string>());
      if (seen[static_cast<std::size_t>(m.id)]) malformed("duplicate manipulator");
      seen[static_cast<std::size_t>(m.id)] = true;
      if (mj.contains("base")) m.base = pose_from_json(mj.at("base"));
      if (mj.contains("tool_offset")) m.tool_offset = pose_from_json(mj.at("tool_offset"));
      for (const json& jj : field(mj, "joints")) {
        JointDescriptor jd;
        const std::string type = field(jj, "type").get<std::string>();
        if (type == "revolute") jd.type = JointType::Revolute;
        else if (type == "prismatic") jd.type = JointType::Prismatic;
        else malformed("unknown joint type '" + type + "'");
        jd.axis = vec3_from_json(field(jj, "axis"), "axis");
        if (jj.contains("offset")) jd.link_offset = pose_from_json(jj.at("offset"));
        const std::string act = field(jj, "actuation").get<std::string>();
        if (act == "passive") jd.actuation = Actuation::PassiveSetup;
        else if (act == "active") jd.actuation = Actuation::Active;
        else malformed("unknown actuation '" + act + "'");
        double default_sigma = 0.0;
        if (jd.actuation == Actuation::PassiveSetup) {
          default_sigma = jd.type == JointType::Prismatic ? 2.0 : 0.01;
        }
        jd.potentiometer_sigma = jj.value("sigma", default_sigma);
        m.joints.push_back(jd);
      }
      chain[m.id] = std::move(m);
    }
  } catch (const json::exception& e) {
    malformed(e.what());
  }
  chain.validate();
  return chain;
}

KinematicChain load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    malformed(e.what());
  }
  return chain_from_json(j);
}

void save_chain(const KinematicChain& chain, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << chain_to_json(chain).dump(2) << '\n';
}

}  // namespace relact
