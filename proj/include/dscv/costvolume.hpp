#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dscv/geometry.hpp"
#include "dscv/grid.hpp"

namespace dscv::costvolume {

enum class Spacing {
  Linear,         // uniform in depth
  InverseLinear,  // uniform in 1/depth
  Explicit,       // loaded from a file; no generating rule known
};

/// Ordered depth values swept during volume construction.
class DepthHypothesisSet {
public:
  DepthHypothesisSet() = default;
  /// Throws InvalidRange unless there are >= 2 positive, finite, strictly increasing values.
  explicit DepthHypothesisSet(std::vector<float> values, Spacing spacing = Spacing::Explicit);

  std::size_t size() const noexcept { return values_.size(); }
  float operator[](std::size_t k) const { return values_[k]; }
  std::span<const float> values() const noexcept { return values_; }
  float d_min() const { return values_.front(); }
  float d_max() const { return values_.back(); }
  Spacing spacing() const noexcept { return spacing_; }

  /// Same depth values; the spacing tag is informational only.
  bool same_values(const DepthHypothesisSet& other) const { return values_ == other.values_; }

private:
  std::vector<float> values_;
  Spacing spacing_ = Spacing::Explicit;
};

inline constexpr int kDefaultBins = 96;
inline constexpr double kDefaultMinDepth = 0.1;
inline constexpr double kDefaultMaxDepth = 100.0;

/// N depths between d_min and d_max (both included). Throws InvalidRange for
/// non-positive or inverted bounds, n < 2, or float-collapsed bins.
DepthHypothesisSet make_hypotheses(double d_min, double d_max, int n, Spacing spacing = Spacing::InverseLinear);

/// N x H x W matching costs (bin-major), lower = better match.
class CostVolume {
public:
  CostVolume() = default;
  CostVolume(DepthHypothesisSet hypotheses, int height, int width, float fill = 0.0f);

  int bins() const noexcept { return static_cast<int>(hypotheses_.size()); }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  const DepthHypothesisSet& hypotheses() const noexcept { return hypotheses_; }

  std::size_t index(int k, int y, int x) const noexcept {
    return (static_cast<std::size_t>(k) * static_cast<std::size_t>(height_) + static_cast<std::size_t>(y)) *
               static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  float& cost(int k, int y, int x) { return costs_[index(k, y, x)]; }
  float cost(int k, int y, int x) const { return costs_[index(k, y, x)]; }
  bool valid(int k, int y, int x) const { return valid_[index(k, y, x)] != 0; }
  void set_valid(int k, int y, int x, bool v) { valid_[index(k, y, x)] = v ? 1 : 0; }

  std::span<float> costs() noexcept { return costs_; }
  std::span<const float> costs() const noexcept { return costs_; }
  std::span<std::uint8_t> validity() noexcept { return valid_; }
  std::span<const std::uint8_t> validity() const noexcept { return valid_; }

  /// Bin k as a single-channel grid.
  ImageGrid slice(int k) const;
  void set_slice(int k, const ImageGrid& costs);

  bool same_layout(const CostVolume& other) const {
    return height_ == other.height_ && width_ == other.width_ && hypotheses_.same_values(other.hypotheses_);
  }

  friend bool operator==(const CostVolume& a, const CostVolume& b) {
    return a.same_layout(b) && a.costs_ == b.costs_ && a.valid_ == b.valid_;
  }

private:
  DepthHypothesisSet hypotheses_;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> costs_;
  std::vector<std::uint8_t> valid_;
};

/// True = occluded.
using OcclusionMask = Mask;

/// Static volume: for every bin, warp the source features into the target view
/// assuming constant depth and score the match with the SSIM + L1 cost.
/// Bins are evaluated on up to `threads` workers; the result does not depend on it.
CostVolume build_static_cv(const ImageGrid& feat_t, const ImageGrid& feat_src, const geometry::CameraIntrinsics& intr,
                           const geometry::PoseSE3& pose, const DepthHypothesisSet& hyps, double alpha_cv,
                           int threads = 1);

/// Dynamic volume: as the static one, with the residual flow added to the
/// rigid sampling coordinate of every bin.
CostVolume build_dynamic_cv(const ImageGrid& feat_t, const ImageGrid& feat_src,
                            const geometry::CameraIntrinsics& intr, const geometry::PoseSE3& pose,
                            const DepthHypothesisSet& hyps, const FlowField& residual, double alpha_cv,
                            int threads = 1);

struct OcclusionParams {
  /// A pixel loses the depth test when a competitor landing in the same source
  /// cell is nearer by more than this fraction of its own source depth.
  double depth_margin = 0.02;
};

/// Geometric occlusion estimate for the warp target <- source.
///
/// A target pixel is occluded when its composed sampling coordinate
/// (rigid reprojection at depth_for_warp, plus the residual if given) leaves
/// the source image, or when it is a splat hole: among all target pixels
/// forward-mapped into the same source unit cell, a nearer one claims the
/// cell, so no source content maps back onto this pixel.
OcclusionMask occlusion_mask(const geometry::CameraIntrinsics& intr, const geometry::PoseSE3& pose,
                             const ImageGrid& depth_for_warp, const FlowField* residual,
                             const OcclusionParams& params = {});

/// Depth of the cheapest valid bin per pixel; ties resolve to the lowest bin.
/// Pixels without any valid bin are invalid.
ImageGrid argmin_depth(const CostVolume& cv);

}  // namespace dscv::costvolume
