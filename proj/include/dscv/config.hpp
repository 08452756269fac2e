#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include "dscv/costvolume.hpp"
#include "dscv/geometry.hpp"
#include "dscv/metrics.hpp"
#include "dscv/photometric.hpp"
#include "dscv/synthetic.hpp"

namespace dscv::config {

using Json = nlohmann::ordered_json;

Json to_json(const geometry::CameraIntrinsics& intr);
geometry::CameraIntrinsics intrinsics_from_json(const Json& j);

/// {"rotation": 9 numbers row-major, "translation": 3 numbers}
Json to_json(const geometry::PoseSE3& pose);
geometry::PoseSE3 pose_from_json(const Json& j);

/// Scene specs. Missing keys take the SceneSpec defaults; unknown keys are rejected.
Json to_json(const synthetic::SceneSpec& spec);
synthetic::SceneSpec scene_from_json(const Json& j);

Json to_json(const metrics::EvalProtocol& protocol);  // region mask omitted
Json to_json(const metrics::DepthEvalReport& report);

/// Parameters of one CLI run. Relative paths are resolved against the
/// directory holding the config file.
struct RunConfig {
  // inputs
  std::filesystem::path target;
  std::filesystem::path source;
  std::filesystem::path flow;
  /// JSON file carrying "intrinsics" and "pose" (e.g. the synth meta.json);
  /// inline values below take precedence.
  std::filesystem::path camera;
  std::optional<geometry::CameraIntrinsics> intrinsics;
  std::optional<geometry::PoseSE3> pose;

  // loss inputs
  std::filesystem::path synth;
  std::filesystem::path synth_static;
  std::filesystem::path synth_dynamic;
  std::filesystem::path disparity;
  std::filesystem::path image;
  std::vector<std::filesystem::path> scales;
  std::filesystem::path final_depth;

  // sweep
  double d_min = costvolume::kDefaultMinDepth;
  double d_max = costvolume::kDefaultMaxDepth;
  int n = costvolume::kDefaultBins;
  costvolume::Spacing spacing = costvolume::Spacing::InverseLinear;

  photometric::LossConfig loss;
  metrics::EvalProtocol protocol;

  int threads = 1;

  /// Range checks of the owning modules. Throws InvalidArgument / InvalidRange.
  void validate() const;
  /// Throws IoError naming the first referenced input that does not exist.
  void check_inputs_exist() const;

  /// Fills intrinsics/pose from `camera` when they are not given inline.
  /// Throws InvalidArgument when neither source provides them.
  void resolve_camera();

  costvolume::DepthHypothesisSet hypotheses() const;
};

/// Every field with its effective value. The thread count is left out so that
/// sidecar metadata is identical for any parallelism degree.
Json to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir);

/// Reads and parses a JSON file. Missing or unreadable files and malformed
/// JSON throw IoError.
Json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const Json& j);

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace dscv::config
