#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "dscv/grid.hpp"

namespace dscv::geometry {

using Point3 = Eigen::Vector3d;
using Pixel = Eigen::Vector2d;
using SceneFlow = Eigen::Vector3d;

/// Pinhole intrinsics K, in pixels.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 2;
  int height = 2;

  /// Throws InvalidArgument unless fx, fy > 0, width, height >= 2 and all fields are finite.
  void validate() const;

  /// Intrinsics for the same camera resampled to new_width x new_height with
  /// corner-aligned pixel centres (x' = x (W'-1)/(W-1)).
  CameraIntrinsics scaled(int new_width, int new_height) const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

/// Rigid transform X' = R X + t. For view synthesis this is T_{target->source}:
/// it maps target-camera coordinates into source-camera coordinates.
class PoseSE3 {
public:
  PoseSE3() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  /// Throws InvalidArgument if `rotation` is not orthonormal with det +1 (tolerance 1e-9).
  PoseSE3(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation);

  static PoseSE3 identity() { return {}; }
  static PoseSE3 from_translation(const Eigen::Vector3d& t) { return {Eigen::Matrix3d::Identity(), t}; }
  /// Rotation about `axis` (normalised internally) by `angle` radians, then translation.
  static PoseSE3 from_axis_angle(const Eigen::Vector3d& axis, double angle, const Eigen::Vector3d& t);

  const Eigen::Matrix3d& rotation() const noexcept { return rotation_; }
  const Eigen::Vector3d& translation() const noexcept { return translation_; }

  Point3 apply(const Point3& p) const { return rotation_ * p + translation_; }
  PoseSE3 inverse() const;
  /// True when rotation is exactly I and translation exactly 0.
  bool is_identity() const;

  /// (a * b)(X) = a(b(X)).
  friend PoseSE3 operator*(const PoseSE3& a, const PoseSE3& b);

private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

struct Projection {
  Pixel pixel;
  double depth = 0.0;
};

struct Reprojection {
  Pixel pixel = Pixel::Zero();
  double depth = 0.0;
  bool valid = false;
};

/// Pinhole projection P(X). Throws NonPositiveDepth if point.z <= 0.
Projection project(const Point3& point, const CameraIntrinsics& intr);

/// Inverse projection P^-1(p, d) = d K^-1 [p; 1]. Throws NonPositiveDepth if depth <= 0.
Point3 backproject(const Pixel& pixel, double depth, const CameraIntrinsics& intr);

/// K [R|t] d K^-1 p. The result is flagged invalid (not thrown) when the
/// transformed point lands on or behind the camera plane.
Reprojection reproject(const Pixel& pixel, double depth, const CameraIntrinsics& intr, const PoseSE3& pose);

/// Rigid flow u_cam(p) = reproject(p, D(p)) - p for every pixel of a depth map.
/// Pixels with invalid, non-finite or non-positive depth, or whose reprojection
/// is behind the camera, are invalid in the output.
FlowField camera_flow(const ImageGrid& depth_map, const CameraIntrinsics& intr, const PoseSE3& pose);

/// u_cam + u_res, elementwise; validity is the AND of both inputs.
FlowField compose_total_flow(const FlowField& cam, const FlowField& residual);

/// Scene flow of a point from two depth observations:
///   pose1^-1 P^-1(pixel + opt_flow, d1) - pose0^-1 P^-1(pixel, d0)
/// with pose0/pose1 the world-to-camera extrinsics of the two frames.
SceneFlow scene_flow_from_depths(const Pixel& pixel, const Eigen::Vector2d& opt_flow, double d0, double d1,
                                 const PoseSE3& pose0, const PoseSE3& pose1, const CameraIntrinsics& intr);

/// Projected optical flow P(pose1 (X + scene_flow)) - P(pose0 X).
Eigen::Vector2d projected_optical_flow(const Point3& point, const SceneFlow& scene_flow, const PoseSE3& pose0,
                                       const PoseSE3& pose1, const CameraIntrinsics& intr);

}  // namespace dscv::geometry
