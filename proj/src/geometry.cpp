#include "dscv/geometry.hpp"

#include <cmath>
#include <string>

#include "dscv/error.hpp"

namespace dscv::geometry {

namespace {

constexpr double kRotationTolerance = 1e-9;

void require_positive_depth(double depth, const char* what) {
  if (!(depth > 0.0)) {
    throw Error(ErrorCode::NonPositiveDepth, std::string(what) + " requires depth > 0, got " + std::to_string(depth));
  }
}

}  // namespace

void CameraIntrinsics::validate() const {
  const bool finite = std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) && std::isfinite(cy);
  if (!finite || !(fx > 0.0) || !(fy > 0.0) || width < 2 || height < 2) {
    throw Error(ErrorCode::InvalidArgument, "intrinsics need finite fx, fy > 0 and width, height >= 2");
  }
}

CameraIntrinsics CameraIntrinsics::scaled(int new_width, int new_height) const {
  validate();
  const double sx = static_cast<double>(new_width - 1) / static_cast<double>(width - 1);
  const double sy = static_cast<double>(new_height - 1) / static_cast<double>(height - 1);
  CameraIntrinsics out{fx * sx, fy * sy, cx * sx, cy * sy, new_width, new_height};
  out.validate();
  return out;
}

PoseSE3::PoseSE3(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "pose contains non-finite values");
  }
  const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  const double det = rotation.determinant();
  if (ortho > kRotationTolerance || std::abs(det - 1.0) > kRotationTolerance) {
    throw Error(ErrorCode::InvalidArgument, "rotation is not a proper orthonormal matrix");
  }
}

PoseSE3 PoseSE3::from_axis_angle(const Eigen::Vector3d& axis, double angle, const Eigen::Vector3d& t) {
  const Eigen::Matrix3d r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return {r, t};
}

PoseSE3 PoseSE3::inverse() const {
  PoseSE3 out;
  out.rotation_ = rotation_.transpose();
  out.translation_ = -(out.rotation_ * translation_);
  return out;
}

bool PoseSE3::is_identity() const {
  return rotation_ == Eigen::Matrix3d::Identity() && translation_ == Eigen::Vector3d::Zero();
}

PoseSE3 operator*(const PoseSE3& a, const PoseSE3& b) {
  PoseSE3 out;
  out.rotation_ = a.rotation_ * b.rotation_;
  out.translation_ = a.rotation_ * b.translation_ + a.translation_;
  return out;
}

Projection project(const Point3& point, const CameraIntrinsics& intr) {
  require_positive_depth(point.z(), "project");
  return {Pixel(intr.fx * point.x() / point.z() + intr.cx, intr.fy * point.y() / point.z() + intr.cy), point.z()};
}

Point3 backproject(const Pixel& pixel, double depth, const CameraIntrinsics& intr) {
  require_positive_depth(depth, "backproject");
  return {(pixel.x() - intr.cx) / intr.fx * depth, (pixel.y() - intr.cy) / intr.fy * depth, depth};
}

Reprojection reproject(const Pixel& pixel, double depth, const CameraIntrinsics& intr, const PoseSE3& pose) {
  require_positive_depth(depth, "reproject");
  if (pose.is_identity()) return {pixel, depth, true};
  const Point3 moved = pose.apply(backproject(pixel, depth, intr));
  if (!(moved.z() > 0.0)) return {};
  const Projection p = project(moved, intr);
  return {p.pixel, p.depth, true};
}

FlowField camera_flow(const ImageGrid& depth_map, const CameraIntrinsics& intr, const PoseSE3& pose) {
  intr.validate();
  if (depth_map.width() != intr.width || depth_map.height() != intr.height || depth_map.channels() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "depth map must be single-channel and match the intrinsics size");
  }
  FlowField flow(intr.height, intr.width);
  for (int y = 0; y < intr.height; ++y) {
    for (int x = 0; x < intr.width; ++x) {
      const double d = depth_map(y, x);
      bool ok = depth_map.valid(y, x) && std::isfinite(d) && d > 0.0;
      if (ok) {
        const Pixel p(x, y);
        const Reprojection r = reproject(p, d, intr, pose);
        ok = r.valid;
        if (ok) {
          flow.u(y, x) = static_cast<float>(r.pixel.x() - p.x());
          flow.v(y, x) = static_cast<float>(r.pixel.y() - p.y());
        }
      }
      flow.set_valid(y, x, ok);
    }
  }
  return flow;
}

FlowField compose_total_flow(const FlowField& cam, const FlowField& residual) {
  if (!cam.same_size(residual)) throw Error(ErrorCode::ShapeMismatch, "flow fields differ in size");
  FlowField out(cam.height(), cam.width());
  for (int y = 0; y < cam.height(); ++y) {
    for (int x = 0; x < cam.width(); ++x) {
      out.u(y, x) = cam.u(y, x) + residual.u(y, x);
      out.v(y, x) = cam.v(y, x) + residual.v(y, x);
      out.set_valid(y, x, cam.valid(y, x) && residual.valid(y, x));
    }
  }
  return out;
}

SceneFlow scene_flow_from_depths(const Pixel& pixel, const Eigen::Vector2d& opt_flow, double d0, double d1,
                                 const PoseSE3& pose0, const PoseSE3& pose1, const CameraIntrinsics& intr) {
  require_positive_depth(d0, "scene_flow_from_depths");
  require_positive_depth(d1, "scene_flow_from_depths");
  const Point3 later = pose1.inverse().apply(backproject(pixel + opt_flow, d1, intr));
  const Point3 earlier = pose0.inverse().apply(backproject(pixel, d0, intr));
  return later - earlier;
}

Eigen::Vector2d projected_optical_flow(const Point3& point, const SceneFlow& scene_flow, const PoseSE3& pose0,
                                       const PoseSE3& pose1, const CameraIntrinsics& intr) {
  const Projection after = project(pose1.apply(point + scene_flow), intr);
  const Projection before = project(pose0.apply(point), intr);
  return after.pixel - before.pixel;
}

}  // namespace dscv::geometry
