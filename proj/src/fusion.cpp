#include "dscv/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "dscv/error.hpp"

namespace dscv::fusion {

using costvolume::CostVolume;
using costvolume::OcclusionMask;

FusionWeights::FusionWeights(int bins, std::vector<float> weights, std::vector<float> biases)
    : bins_(bins), weights_(std::move(weights)), biases_(std::move(biases)) {
  if (bins < 1 || weights_.size() != static_cast<std::size_t>(bins) * 2 * bins ||
      biases_.size() != static_cast<std::size_t>(bins)) {
    throw Error(ErrorCode::WeightDimMismatch, "fusion weights must be N x 2N with N biases");
  }
  const auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(weights_.begin(), weights_.end(), finite) || !std::all_of(biases_.begin(), biases_.end(), finite)) {
    throw Error(ErrorCode::InvalidArgument, "fusion weights must be finite");
  }
}

FusionWeights FusionWeights::averaging(int bins) {
  std::vector<float> w(static_cast<std::size_t>(bins) * 2 * bins, 0.0f);
  for (int k = 0; k < bins; ++k) {
    w[static_cast<std::size_t>(k) * 2 * bins + k] = 0.5f;
    w[static_cast<std::size_t>(k) * 2 * bins + bins + k] = 0.5f;
  }
  return {bins, std::move(w), std::vector<float>(static_cast<std::size_t>(bins), 0.0f)};
}

namespace {

void require_pair(const CostVolume& a, const CostVolume& b) {
  if (a.height() != b.height() || a.width() != b.width() || a.bins() != b.bins()) {
    throw Error(ErrorCode::ShapeMismatch, "cost volumes differ in shape");
  }
  if (!a.hypotheses().same_values(b.hypotheses())) {
    throw Error(ErrorCode::HypothesisMismatch, "cost volumes were swept over different depths");
  }
}

}  // namespace

CostVolume complementary_fuse(const CostVolume& cv_s, const CostVolume& cv_d, const OcclusionMask& occ_s,
                              const OcclusionMask& occ_d) {
  require_pair(cv_s, cv_d);
  if (occ_s.height() != cv_s.height() || occ_s.width() != cv_s.width() || !occ_s.same_size(occ_d)) {
    throw Error(ErrorCode::ShapeMismatch, "occlusion masks do not match the volumes");
  }
  CostVolume out(cv_s.hypotheses(), cv_s.height(), cv_s.width());
  for (int y = 0; y < cv_s.height(); ++y) {
    for (int x = 0; x < cv_s.width(); ++x) {
      const bool s_hidden = occ_s(y, x);
      const bool d_hidden = occ_d(y, x);
      for (int k = 0; k < cv_s.bins(); ++k) {
        const std::size_t i = cv_s.index(k, y, x);
        const float cs = cv_s.costs()[i];
        const float cd = cv_d.costs()[i];
        const bool vs = cv_s.validity()[i] != 0;
        const bool vd = cv_d.validity()[i] != 0;
        float c;
        bool v;
        if (s_hidden && !d_hidden) {
          c = cd;
          v = vd;
        } else if (d_hidden && !s_hidden) {
          c = cs;
          v = vs;
        } else if (vs != vd) {
          c = vs ? cs : cd;
          v = true;
        } else {
          c = std::min(cs, cd);
          v = vs;
        }
        out.costs()[i] = c;
        out.validity()[i] = v ? 1 : 0;
      }
    }
  }
  return out;
}

CostVolume concat_fuse(const CostVolume& cv_s, const CostVolume& cv_d, const FusionWeights& weights) {
  require_pair(cv_s, cv_d);
  const int n = cv_s.bins();
  if (weights.bins() != n) throw Error(ErrorCode::WeightDimMismatch, "fusion weights do not match the bin count");
  CostVolume out(cv_s.hypotheses(), cv_s.height(), cv_s.width());
  std::vector<double> stacked(static_cast<std::size_t>(2 * n));
  std::vector<std::uint8_t> stacked_valid(static_cast<std::size_t>(2 * n));
  for (int y = 0; y < cv_s.height(); ++y) {
    for (int x = 0; x < cv_s.width(); ++x) {
      for (int j = 0; j < n; ++j) {
        const std::size_t i = cv_s.index(j, y, x);
        stacked[static_cast<std::size_t>(j)] = cv_s.costs()[i];
        stacked[static_cast<std::size_t>(n + j)] = cv_d.costs()[i];
        stacked_valid[static_cast<std::size_t>(j)] = cv_s.validity()[i];
        stacked_valid[static_cast<std::size_t>(n + j)] = cv_d.validity()[i];
      }
      for (int k = 0; k < n; ++k) {
        double acc = weights.bias(k);
        bool ok = true;
        for (int j = 0; j < 2 * n; ++j) {
          const float wkj = weights.weight(k, j);
          if (wkj == 0.0f) continue;
          acc += static_cast<double>(wkj) * stacked[static_cast<std::size_t>(j)];
          ok = ok && stacked_valid[static_cast<std::size_t>(j)] != 0;
        }
        out.cost(k, y, x) = static_cast<float>(acc);
        out.set_valid(k, y, x, ok);
      }
    }
  }
  return out;
}

CostVolume fuse(const CostVolume& cv_com, const CostVolume& cv_cat) {
  require_pair(cv_com, cv_cat);
  CostVolume out(cv_com.hypotheses(), cv_com.height(), cv_com.width());
  const auto a = cv_com.costs();
  const auto b = cv_cat.costs();
  const auto va = cv_com.validity();
  const auto vb = cv_cat.validity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    out.costs()[i] = a[i] + b[i];
    out.validity()[i] = (va[i] && vb[i]) ? 1 : 0;
  }
  return out;
}

}  // namespace dscv::fusion
