#pragma once

#include <vector>

#include "dscv/costvolume.hpp"

namespace dscv::fusion {

/// Per-pixel 2N -> N linear mixing (a 1x1 convolution) with N biases.
/// Input channel j < N is static bin j; channel N + j is dynamic bin j.
class FusionWeights {
public:
  FusionWeights() = default;
  /// weights is N x 2N row-major. Throws WeightDimMismatch if the sizes disagree
  /// or InvalidArgument on non-finite entries.
  FusionWeights(int bins, std::vector<float> weights, std::vector<float> biases);

  /// out_k = 0.5 S_k + 0.5 D_k, zero bias.
  static FusionWeights averaging(int bins);

  int bins() const noexcept { return bins_; }
  float weight(int out_bin, int in_channel) const {
    return weights_[static_cast<std::size_t>(out_bin) * 2 * bins_ + in_channel];
  }
  float bias(int out_bin) const { return biases_[static_cast<std::size_t>(out_bin)]; }
  const std::vector<float>& weights() const noexcept { return weights_; }
  const std::vector<float>& biases() const noexcept { return biases_; }

  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;

private:
  int bins_ = 0;
  std::vector<float> weights_;
  std::vector<float> biases_;
};

/// Occlusion-aware complementary selection, per pixel column:
///   occluded in S only -> D's column; occluded in D only -> S's column;
///   otherwise (visible in both, or occluded in both) -> per-bin minimum.
/// The per-bin minimum skips an invalid operand when the other one is valid.
costvolume::CostVolume complementary_fuse(const costvolume::CostVolume& cv_s, const costvolume::CostVolume& cv_d,
                                          const costvolume::OcclusionMask& occ_s,
                                          const costvolume::OcclusionMask& occ_d);

/// Concatenation branch: stack [S; D] and apply the per-pixel linear map.
/// An output bin is valid when every input channel with non-zero weight is valid.
costvolume::CostVolume concat_fuse(const costvolume::CostVolume& cv_s, const costvolume::CostVolume& cv_d,
                                   const FusionWeights& weights);

/// CV_f = CV_com + CV_cat, elementwise; validity is the AND.
costvolume::CostVolume fuse(const costvolume::CostVolume& cv_com, const costvolume::CostVolume& cv_cat);

}  // namespace dscv::fusion
