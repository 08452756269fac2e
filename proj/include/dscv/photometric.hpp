#pragma once

#include <span>
#include <vector>

#include "dscv/grid.hpp"

namespace dscv::photometric {

/// SSIM stabilisers for a [0, 1] dynamic range.
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

struct LossConfig {
  double alpha_cv = 0.4;      // SSIM weight of the matching cost
  double alpha_photo = 0.85;  // SSIM weight of the photometric loss
  double q = 0.4;             // robust penalty exponent
  double epsilon = 0.1;       // robust penalty offset

  /// Throws InvalidArgument outside 0 <= alpha <= 1, q > 0, epsilon > 0.
  void validate() const;
};

/// Per-pixel error map: a single-channel ImageGrid.
using ErrorMap = ImageGrid;

/// Per-pixel SSIM with 3x3 uniform statistics and reflection padding,
/// averaged over channels. Validity is the AND of both inputs.
ImageGrid ssim(const ImageGrid& a, const ImageGrid& b);

/// Matching cost  alpha (1 - SSIM) + (1 - alpha) |a - b|_1  per pixel,
/// with L1 averaged over channels.
ErrorMap cost_error(const ImageGrid& warped, const ImageGrid& target, double alpha_cv);

/// Mean over valid pixels of  (alpha/2)(1 - SSIM) + (1 - alpha) L1.
double photometric_loss(const ImageGrid& target, const ImageGrid& synth, double alpha_photo);

/// Mean over valid pixels of
///   (alpha/2)(1 - max(SSIM(t,s), SSIM(t,d))) + (1 - alpha) min(L1(t,s), L1(t,d)).
double adaptive_photometric_loss(const ImageGrid& target, const ImageGrid& synth_static,
                                 const ImageGrid& synth_dynamic, double alpha_photo);

/// Edge-aware smoothness of the mean-normalised disparity:
///   mean_x |dx d^| exp(-|dx I|) + mean_y |dy d^| exp(-|dy I|)
/// with forward differences and the image gradient averaged over channels.
double edge_aware_smoothness(const ImageGrid& disp, const ImageGrid& image);

/// (|x| + epsilon)^q
double robust_penalty(double x, double q, double epsilon);
ImageGrid robust_penalty(const ImageGrid& x, double q, double epsilon);

/// Sum over scales of mean_pixels robust_penalty(final - upsample(scale)),
/// with the corner-aligned upsampling evaluated in double precision. Pixels
/// invalid in either map are skipped. `final_depth` is a fixed pseudo-label.
/// Throws InvalidTarget for a scale larger than final_depth.
double pyramid_distillation_loss(std::span<const ImageGrid> scale_depths, const ImageGrid& final_depth, double q,
                                 double epsilon);

}  // namespace dscv::photometric
