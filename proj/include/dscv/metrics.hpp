#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dscv/grid.hpp"

namespace dscv::metrics {

struct DepthEvalReport {
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double rmse = 0.0;
  double rmse_log = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  std::size_t n_valid = 0;
  /// Median-scaling ratio applied to the prediction (1 when scaling is off).
  double scale = 1.0;
};

struct EvalProtocol {
  double min_depth = 1e-3;
  double max_depth = 80.0;
  bool median_scaling = false;
  std::optional<Mask> region_mask;

  /// Throws InvalidArgument unless 0 < min_depth < max_depth.
  void validate() const;
};

/// Standard depth statistics over pixels whose ground truth lies in
/// [min_depth, max_depth] and inside the region mask. Predictions are
/// optionally median-scaled, then clamped to [min_depth, max_depth].
/// Throws NoValidPixels if nothing survives the mask.
DepthEvalReport evaluate(const ImageGrid& pred, const ImageGrid& gt, const EvalProtocol& protocol = {});

struct Histogram {
  double lo = 0.0;
  double hi = 1.0;
  std::vector<std::size_t> counts;

  double bin_lo(std::size_t i) const { return lo + (hi - lo) * static_cast<double>(i) / counts.size(); }
  double bin_hi(std::size_t i) const { return lo + (hi - lo) * static_cast<double>(i + 1) / counts.size(); }
  std::size_t total() const;
};

/// Histogram of per-pixel |p - g| / g over the same pixel set as evaluate().
/// Values outside [lo, hi) are counted in the first or last bin, so the
/// counts always sum to n_valid.
Histogram error_histogram(const ImageGrid& pred, const ImageGrid& gt, const EvalProtocol& protocol, int n_bins,
                          double lo, double hi);

/// Per-pixel |p - g| / g map (invalid outside the evaluated set).
ImageGrid abs_rel_map(const ImageGrid& pred, const ImageGrid& gt, const EvalProtocol& protocol = {});

}  // namespace dscv::metrics
