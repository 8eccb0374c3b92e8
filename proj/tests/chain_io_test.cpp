#include "relact/chain_io.hpp"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "relact/error.hpp"

namespace relact {
namespace {

namespace fs = std::filesystem;

void expect_same_chain(const KinematicChain& a, const KinematicChain& b) {
  EXPECT_EQ(a.max_fk_error_mm, b.max_fk_error_mm);
  EXPECT_EQ(a.workspace_half_extent_mm, b.workspace_half_extent_mm);
  EXPECT_EQ(a.jaw.min, b.jaw.min);
  EXPECT_EQ(a.jaw.max, b.jaw.max);
  for (ManipulatorId id : kManipulators) {
    const Manipulator& ma = a[id];
    const Manipulator& mb = b[id];
    EXPECT_EQ(ma.id, mb.id);
    EXPECT_EQ(max_abs_diff(ma.base, mb.base), 0.0);
    EXPECT_EQ(max_abs_diff(ma.tool_offset, mb.tool_offset), 0.0);
    ASSERT_EQ(ma.joints.size(), mb.joints.size());
    for (std::size_t i = 0; i < ma.joints.size(); ++i) {
      EXPECT_EQ(ma.joints[i].type, mb.joints[i].type);
      EXPECT_EQ(ma.joints[i].axis, mb.joints[i].axis);
      EXPECT_EQ(ma.joints[i].actuation, mb.joints[i].actuation);
      EXPECT_EQ(ma.joints[i].potentiometer_sigma, mb.joints[i].potentiometer_sigma);
      EXPECT_EQ(max_abs_diff(ma.joints[i].link_offset, mb.joints[i].link_offset), 0.0);
    }
  }
}

TEST(ChainIoTest, JsonRoundTripIsExact) {
  const KinematicChain chain = default_chain();
  expect_same_chain(chain_from_json(chain_to_json(chain)), chain);
}

TEST(ChainIoTest, FileRoundTrip) {
  const fs::path path = fs::temp_directory_path() / "relact_chain_io_test.json";
  save_chain(zero_noise_chain(), path);
  expect_same_chain(load_chain(path), zero_noise_chain());
  fs::remove(path);
}

TEST(ChainIoTest, ShippedFilesMatchBuiltins) {
  expect_same_chain(load_chain(fs::path(RELACT_DATA_DIR) / "default_chain.json"), default_chain());
  expect_same_chain(load_chain(fs::path(RELACT_DATA_DIR) / "zero_noise_chain.json"),
                    zero_noise_chain());
}

TEST(ChainIoTest, OmittedSigmasTakeDefaults) {
  nlohmann::json j = chain_to_json(default_chain());
  for (auto& m : j["manipulators"]) {
    for (auto& joint : m["joints"]) joint.erase("sigma");
  }
  const KinematicChain chain = chain_from_json(j);
  const Manipulator& psm = chain[ManipulatorId::PSM1];
  EXPECT_EQ(psm.joints[0].potentiometer_sigma, 2.0);
  EXPECT_EQ(psm.joints[1].potentiometer_sigma, 0.01);
  EXPECT_EQ(psm.joints[3].potentiometer_sigma, 0.0);
}

TEST(ChainIoTest, SchemaMismatch) {
  nlohmann::json j = chain_to_json(default_chain());
  j["schema"] = "relact-chain/2";
  try {
    chain_from_json(j);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SchemaVersionMismatch);
  }
}

TEST(ChainIoTest, StructuralErrors) {
  nlohmann::json j = chain_to_json(default_chain());
  j["manipulators"].erase(0);
  EXPECT_THROW(chain_from_json(j), Error);

  nlohmann::json bad_type = chain_to_json(default_chain());
  bad_type["manipulators"][1]["joints"][0]["type"] = "helical";
  EXPECT_THROW(chain_from_json(bad_type), Error);

  nlohmann::json bad_rot = chain_to_json(default_chain());
  bad_rot["manipulators"][0]["base"]["R"] = {2, 0, 0, 0, 1, 0, 0, 0, 1};
  EXPECT_THROW(chain_from_json(bad_rot), Error);
}

TEST(ChainIoTest, MissingFileIsIoError) {
  try {
    load_chain("/nonexistent/relact/chain.json");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IoError);
  }
}

}  // namespace
}  // namespace relact
