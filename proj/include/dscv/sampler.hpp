#pragma once

#include <optional>
#include <vector>

#include "dscv/grid.hpp"

namespace dscv::sampler {

/// Coordinates within this distance of the image border are snapped onto it
/// instead of being treated as out of bounds. Absorbs rounding in the
/// projection chain so an exact border hit is not lost to 1e-15 px noise.
inline constexpr double kBorderTolerance = 1e-6;

/// Continuous source coordinates (pixels) for every output pixel.
struct SampleCoords {
  SampleCoords() = default;
  SampleCoords(int height, int width);  // zeros, all valid

  int height = 0;
  int width = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::uint8_t> valid;

  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) + static_cast<std::size_t>(col);
  }
  /// Identity grid: (x, y) at pixel (x, y).
  static SampleCoords identity(int height, int width);
};

/// Analytic partial derivatives of a bilinear sample w.r.t. its coordinates.
struct SampleGradient {
  ImageGrid d_dx;
  ImageGrid d_dy;
};

/// Four-neighbour bilinear interpolation of `src` at `coords`.
///
/// Coordinates outside [0, W-1] x [0, H-1] (beyond kBorderTolerance) produce
/// value 0 and validity false. An output pixel is also invalid when its
/// coordinate is invalid or any source tap with non-zero weight is invalid.
ImageGrid bilinear_sample(const ImageGrid& src, const SampleCoords& coords);

/// d(sample)/dx and d(sample)/dy. At exact integer coordinates the cell to the
/// right (below) is used; at the last column (row) the cell to the left (above).
SampleGradient bilinear_sample_grad(const ImageGrid& src, const SampleCoords& coords);

/// Double-precision single-point versions of the two functions above; the
/// grid variants are these evaluated per pixel and rounded to float.
/// nullopt wherever the grid variant reports an invalid pixel.
std::optional<double> sample_at(const ImageGrid& src, double x, double y, int channel = 0);

struct PointGradient {
  double d_dx = 0.0;
  double d_dy = 0.0;
};
std::optional<PointGradient> sample_grad_at(const ImageGrid& src, double x, double y, int channel = 0);

/// Backward warp: out(p) = src(p + flow(p)). Throws ShapeMismatch on size mismatch.
ImageGrid warp(const ImageGrid& src, const FlowField& flow);

/// Corner-aligned bilinear upsampling to target_h x target_w.
/// Throws InvalidTarget if the target is smaller than the source in either dimension.
ImageGrid upsample(const ImageGrid& src, int target_h, int target_w);

}  // namespace dscv::sampler
