#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

#include "relact/kinematics.hpp"

namespace relact {

inline constexpr std::string_view kChainSchema = "relact-chain/1";

nlohmann::json pose_to_json(const Pose& g);
/// Throws MalformedRecord on a structurally bad pose.
Pose pose_from_json(const nlohmann::json& j);

nlohmann::json chain_to_json(const KinematicChain& chain);
/// Omitted sigmas default to 0 for active joints and to 2 mm / 0.01 rad for
/// passive setup joints.
KinematicChain chain_from_json(const nlohmann::json& j);

KinematicChain load_chain(const std::filesystem::path& path);
void save_chain(const KinematicChain& chain, const std::filesystem::path& path);

}  // namespace relact
