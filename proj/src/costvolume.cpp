#include "dscv/costvolume.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dscv/error.hpp"
#include "dscv/parallel.hpp"
#include "dscv/photometric.hpp"
#include "dscv/sampler.hpp"

namespace dscv::costvolume {

using geometry::CameraIntrinsics;
using geometry::Pixel;
using geometry::PoseSE3;

DepthHypothesisSet::DepthHypothesisSet(std::vector<float> values, Spacing spacing)
    : values_(std::move(values)), spacing_(spacing) {
  if (values_.size() < 2) throw Error(ErrorCode::InvalidRange, "need at least two depth hypotheses");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k]) || !(values_[k] > 0.0f)) {
      throw Error(ErrorCode::InvalidRange, "depth hypotheses must be positive and finite");
    }
    if (k > 0 && !(values_[k] > values_[k - 1])) {
      throw Error(ErrorCode::InvalidRange, "depth hypotheses must be strictly increasing");
    }
  }
}

DepthHypothesisSet make_hypotheses(double d_min, double d_max, int n, Spacing spacing) {
  if (!std::isfinite(d_min) || !std::isfinite(d_max) || !(d_min > 0.0) || !(d_min < d_max)) {
    throw Error(ErrorCode::InvalidRange, "need 0 < d_min < d_max");
  }
  if (n < 2) throw Error(ErrorCode::InvalidRange, "need at least two bins");
  if (spacing == Spacing::Explicit) throw Error(ErrorCode::InvalidArgument, "explicit spacing has no generator");
  std::vector<float> values(static_cast<std::size_t>(n));
  const double steps = n - 1;
  for (int k = 0; k < n; ++k) {
    const double t = k / steps;
    double d;
    if (spacing == Spacing::Linear) {
      d = d_min + t * (d_max - d_min);
    } else {
      d = 1.0 / (1.0 / d_min + t * (1.0 / d_max - 1.0 / d_min));
    }
    values[static_cast<std::size_t>(k)] = static_cast<float>(d);
  }
  values.front() = static_cast<float>(d_min);
  values.back() = static_cast<float>(d_max);
  return DepthHypothesisSet(std::move(values), spacing);
}

CostVolume::CostVolume(DepthHypothesisSet hypotheses, int height, int width, float fill)
    : hypotheses_(std::move(hypotheses)), height_(height), width_(width) {
  if (height < 1 || width < 1 || hypotheses_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "cost volume needs positive size and >= 2 hypotheses");
  }
  const std::size_t n = hypotheses_.size() * static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  costs_.assign(n, fill);
  valid_.assign(n, 1);
}

ImageGrid CostVolume::slice(int k) const {
  ImageGrid out(height_, width_, 1);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      out(y, x) = cost(k, y, x);
      out.set_valid(y, x, valid(k, y, x));
    }
  }
  return out;
}

void CostVolume::set_slice(int k, const ImageGrid& grid) {
  if (grid.height() != height_ || grid.width() != width_ || grid.channels() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "slice does not match the volume");
  }
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      cost(k, y, x) = grid(y, x);
      set_valid(k, y, x, grid.valid(y, x));
    }
  }
}

namespace {

void require_sweep_inputs(const ImageGrid& feat_t, const ImageGrid& feat_src, const CameraIntrinsics& intr,
                          const FlowField* residual) {
  intr.validate();
  if (!feat_t.same_shape(feat_src)) throw Error(ErrorCode::ShapeMismatch, "target and source features differ");
  if (feat_t.width() != intr.width || feat_t.height() != intr.height) {
    throw Error(ErrorCode::ShapeMismatch, "intrinsics are not scaled to the feature resolution");
  }
  if (residual && (residual->width() != feat_t.width() || residual->height() != feat_t.height())) {
    throw Error(ErrorCode::ShapeMismatch, "residual flow does not match the feature resolution");
  }
}

CostVolume sweep(const ImageGrid& feat_t, const ImageGrid& feat_src, const CameraIntrinsics& intr,
                 const PoseSE3& pose, const DepthHypothesisSet& hyps, const FlowField* residual, double alpha_cv,
                 int threads) {
  require_sweep_inputs(feat_t, feat_src, intr, residual);
  const int h = feat_t.height();
  const int w = feat_t.width();
  CostVolume cv(hyps, h, w);
  parallel_for(static_cast<int>(hyps.size()), threads, [&](int k) {
    const double depth = hyps[static_cast<std::size_t>(k)];
    sampler::SampleCoords coords(h, w);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = coords.index(y, x);
        const auto r = geometry::reproject(Pixel(x, y), depth, intr, pose);
        bool ok = r.valid;
        double sx = r.pixel.x();
        double sy = r.pixel.y();
        if (residual) {
          ok = ok && residual->valid(y, x);
          sx += residual->u(y, x);
          sy += residual->v(y, x);
        }
        coords.x[i] = sx;
        coords.y[i] = sy;
        coords.valid[i] = ok ? 1 : 0;
      }
    }
    const ImageGrid warped = sampler::bilinear_sample(feat_src, coords);
    cv.set_slice(k, photometric::cost_error(warped, feat_t, alpha_cv));
  });
  return cv;
}

bool inside(double x, double y, int w, int h) {
  constexpr double tol = sampler::kBorderTolerance;
  return std::isfinite(x) && std::isfinite(y) && x >= -tol && y >= -tol && x <= (w - 1) + tol &&
         y <= (h - 1) + tol;
}

}  // namespace

CostVolume build_static_cv(const ImageGrid& feat_t, const ImageGrid& feat_src, const CameraIntrinsics& intr,
                           const PoseSE3& pose, const DepthHypothesisSet& hyps, double alpha_cv, int threads) {
  return sweep(feat_t, feat_src, intr, pose, hyps, nullptr, alpha_cv, threads);
}

CostVolume build_dynamic_cv(const ImageGrid& feat_t, const ImageGrid& feat_src, const CameraIntrinsics& intr,
                            const PoseSE3& pose, const DepthHypothesisSet& hyps, const FlowField& residual,
                            double alpha_cv, int threads) {
  return sweep(feat_t, feat_src, intr, pose, hyps, &residual, alpha_cv, threads);
}

OcclusionMask occlusion_mask(const CameraIntrinsics& intr, const PoseSE3& pose, const ImageGrid& depth_for_warp,
                             const FlowField* residual, const OcclusionParams& params) {
  intr.validate();
  const int h = intr.height;
  const int w = intr.width;
  if (depth_for_warp.width() != w || depth_for_warp.height() != h || depth_for_warp.channels() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "depth map must be single-channel and match the intrinsics size");
  }
  if (residual && (residual->width() != w || residual->height() != h)) {
    throw Error(ErrorCode::ShapeMismatch, "residual flow does not match the depth map");
  }

  OcclusionMask occluded(h, w, false);
  const std::size_t n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  std::vector<int> cell_of(n, -1);
  std::vector<double> source_depth(n, 0.0);
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double d = depth_for_warp(y, x);
      if (!depth_for_warp.valid(y, x) || !std::isfinite(d) || !(d > 0.0)) {
        occluded.set(y, x, true);
        continue;
      }
      const auto r = geometry::reproject(Pixel(x, y), d, intr, pose);
      double sx = r.pixel.x();
      double sy = r.pixel.y();
      bool ok = r.valid;
      if (residual) {
        ok = ok && residual->valid(y, x);
        sx += residual->u(y, x);
        sy += residual->v(y, x);
      }
      if (!ok || !inside(sx, sy, w, h)) {
        occluded.set(y, x, true);
        continue;
      }
      const int cx = std::clamp(static_cast<int>(std::lround(sx)), 0, w - 1);
      const int cy = std::clamp(static_cast<int>(std::lround(sy)), 0, h - 1);
      const int cell = cy * w + cx;
      cell_of[i] = cell;
      source_depth[i] = r.depth;
      nearest[static_cast<std::size_t>(cell)] = std::min(nearest[static_cast<std::size_t>(cell)], r.depth);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (cell_of[i] < 0) continue;
    if (nearest[static_cast<std::size_t>(cell_of[i])] < source_depth[i] * (1.0 - params.depth_margin)) {
      occluded.data()[i] = 1;
    }
  }
  return occluded;
}

ImageGrid argmin_depth(const CostVolume& cv) {
  ImageGrid depth(cv.height(), cv.width(), 1, 0.0f);
  for (int y = 0; y < cv.height(); ++y) {
    for (int x = 0; x < cv.width(); ++x) {
      int best = -1;
      float best_cost = 0.0f;
      for (int k = 0; k < cv.bins(); ++k) {
        if (!cv.valid(k, y, x)) continue;
        const float c = cv.cost(k, y, x);
        if (best < 0 || c < best_cost) {
          best = k;
          best_cost = c;
        }
      }
      depth.set_valid(y, x, best >= 0);
      if (best >= 0) depth(y, x) = cv.hypotheses()[static_cast<std::size_t>(best)];
    }
  }
  return depth;
}

}  // namespace dscv::costvolume
