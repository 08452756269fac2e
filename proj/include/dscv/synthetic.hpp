#pragma once

#include <cstdint>
#include <vector>

#include "dscv/costvolume.hpp"
#include "dscv/geometry.hpp"
#include "dscv/grid.hpp"

namespace dscv::synthetic {

/// Band-limited procedural texture: a sum of seeded sinusoids.
struct TextureSpec {
  std::uint64_t seed = 1;
  int components = 8;
  /// Wavelength range in texture units; one unit is one target pixel at the
  /// surface's reference depth.
  double min_wavelength = 24.0;
  double max_wavelength = 64.0;
  /// Sum of component amplitudes; values stay within 0.5 +/- contrast.
  double contrast = 0.4;
};

/// Infinite plane n.X = n.(0, 0, depth) in target-camera coordinates.
struct BackgroundSpec {
  double depth = 10.0;
  Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
  TextureSpec texture;
};

/// Fronto-parallel textured rectangle. `center` is its position at the
/// target time t in target-camera coordinates; at the source time t-1 it sits
/// at center - velocity.
struct ObjectSpec {
  Eigen::Vector3d center = Eigen::Vector3d(0.0, 0.0, 4.0);
  Eigen::Vector2d size = Eigen::Vector2d(1.0, 1.0);
  Eigen::Vector3d velocity = Eigen::Vector3d::Zero();  // meters per frame
  TextureSpec texture;
};

struct SceneSpec {
  geometry::CameraIntrinsics intrinsics{100.0, 100.0, 63.5, 47.5, 128, 96};
  BackgroundSpec background;
  std::vector<ObjectSpec> objects;
  /// Target camera -> source camera.
  geometry::PoseSE3 camera_motion;
  double noise_sigma = 0.0;

  /// Throws InvalidArgument for non-positive depths, objects outside the
  /// target view, bad textures or a negative noise level.
  void validate() const;
};

/// Both frames plus analytic ground truth, all on the target pixel grid.
struct RenderedPair {
  geometry::CameraIntrinsics intrinsics;
  ImageGrid image_t;
  ImageGrid image_src;
  ImageGrid depth_t;
  geometry::PoseSE3 pose;  // target -> source
  FlowField camera_flow;
  FlowField residual_flow;
  FlowField total_flow;
  Mask object_mask;
  /// Out of view in the source frame, or hidden there behind a nearer surface.
  Mask occlusion_mask;
  /// Pixels whose 3x3 target neighbourhood, or whose 4x4 source sampling
  /// neighbourhood, spans more than one surface.
  Mask discontinuity_mask;
};

/// Z-buffered ray-cast rendering of both frames. Flows come from the known
/// geometry, not from matching. Throws DegenerateScene if a pixel of either
/// frame sees no surface at positive depth.
RenderedPair render_pair(const SceneSpec& spec, std::uint64_t seed);

/// Adds seeded zero-mean Gaussian noise of standard deviation sigma to both
/// components of every valid pixel. sigma = 0 returns the input unchanged.
FlowField perturb_flow(const FlowField& flow, double sigma, std::uint64_t seed);

/// Seeded scene generators used by the test and acceptance suites.
namespace scenarios {

/// Default sweep for the scenario scenes: 32 inverse-spaced bins in [1, 20] m.
inline constexpr double kMinDepth = 1.0;
inline constexpr double kMaxDepth = 20.0;
inline constexpr int kBins = 32;
costvolume::DepthHypothesisSet hypotheses();

/// Noise-free textured fronto-parallel plane at a hypothesis depth, camera
/// translated by at least 0.1 m.
SceneSpec static_plane(std::uint64_t seed);

/// Static plane background plus one textured rectangle moving with a
/// velocity that is not explained by the camera motion. Rendered at
/// 256 x 192 (fx = fy = 200).
SceneSpec moving_object(std::uint64_t seed);

}  // namespace scenarios

}  // namespace dscv::synthetic
