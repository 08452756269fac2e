#include "dscv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dscv/error.hpp"

namespace dscv::metrics {

namespace {

struct Samples {
  std::vector<std::size_t> pixels;
  std::vector<double> pred;
  std::vector<double> gt;
  double scale = 1.0;
};

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Samples collect(const ImageGrid& pred, const ImageGrid& gt, const EvalProtocol& protocol) {
  protocol.validate();
  if (!pred.same_shape(gt) || pred.channels() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "prediction and ground truth must be single-channel grids of equal size");
  }
  if (protocol.region_mask && (protocol.region_mask->height() != gt.height() ||
                               protocol.region_mask->width() != gt.width())) {
    throw Error(ErrorCode::ShapeMismatch, "region mask does not match the depth maps");
  }
  Samples s;
  for (int y = 0; y < gt.height(); ++y) {
    for (int x = 0; x < gt.width(); ++x) {
      const double g = gt(y, x);
      const double p = pred(y, x);
      if (!gt.valid(y, x) || !pred.valid(y, x) || !std::isfinite(g) || !std::isfinite(p)) continue;
      if (g < protocol.min_depth || g > protocol.max_depth) continue;
      if (protocol.region_mask && !(*protocol.region_mask)(y, x)) continue;
      s.pixels.push_back(static_cast<std::size_t>(y) * gt.width() + x);
      s.pred.push_back(p);
      s.gt.push_back(g);
    }
  }
  if (s.pixels.empty()) throw Error(ErrorCode::NoValidPixels, "no ground-truth pixel inside the evaluation range");
  if (protocol.median_scaling) {
    const double mp = median(s.pred);
    if (!(mp > 0.0)) throw Error(ErrorCode::InvalidArgument, "median prediction must be positive for scaling");
    s.scale = median(s.gt) / mp;
    for (double& p : s.pred) p *= s.scale;
  }
  for (double& p : s.pred) p = std::clamp(p, protocol.min_depth, protocol.max_depth);
  return s;
}

}  // namespace

void EvalProtocol::validate() const {
  if (!(min_depth > 0.0) || !(min_depth < max_depth) || !std::isfinite(max_depth)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < min_depth < max_depth");
  }
}

DepthEvalReport evaluate(const ImageGrid& pred, const ImageGrid& gt, const EvalProtocol& protocol) {
  const Samples s = collect(pred, gt, protocol);
  double abs_rel = 0.0, sq_rel = 0.0, sq = 0.0, sq_log = 0.0;
  std::size_t d1 = 0, d2 = 0, d3 = 0;
  for (std::size_t i = 0; i < s.pred.size(); ++i) {
    const double p = s.pred[i];
    const double g = s.gt[i];
    const double diff = p - g;
    abs_rel += std::abs(diff) / g;
    sq_rel += diff * diff / g;
    sq += diff * diff;
    const double log_diff = std::log(p) - std::log(g);
    sq_log += log_diff * log_diff;
    const double ratio = std::max(p / g, g / p);
    if (ratio < 1.25) ++d1;
    if (ratio < 1.25 * 1.25) ++d2;
    if (ratio < 1.25 * 1.25 * 1.25) ++d3;
  }
  const double n = static_cast<double>(s.pred.size());
  DepthEvalReport r;
  r.abs_rel = abs_rel / n;
  r.sq_rel = sq_rel / n;
  r.rmse = std::sqrt(sq / n);
  r.rmse_log = std::sqrt(sq_log / n);
  r.delta1 = static_cast<double>(d1) / n;
  r.delta2 = static_cast<double>(d2) / n;
  r.delta3 = static_cast<double>(d3) / n;
  r.n_valid = s.pred.size();
  r.scale = s.scale;
  return r;
}

std::size_t Histogram::total() const { return std::accumulate(counts.begin(), counts.end(), std::size_t{0}); }

Histogram error_histogram(const ImageGrid& pred, const ImageGrid& gt, const EvalProtocol& protocol, int n_bins,
                          double lo, double hi) {
  if (n_bins < 1 || !(lo < hi)) throw Error(ErrorCode::InvalidArgument, "histogram needs >= 1 bin and lo < hi");
  const Samples s = collect(pred, gt, protocol);
  Histogram hist{lo, hi, std::vector<std::size_t>(static_cast<std::size_t>(n_bins), 0)};
  for (std::size_t i = 0; i < s.pred.size(); ++i) {
    const double e = std::abs(s.pred[i] - s.gt[i]) / s.gt[i];
    const double t = (e - lo) / (hi - lo) * n_bins;
    const int bin = t < 0.0 ? 0 : static_cast<int>(std::min(std::floor(t), static_cast<double>(n_bins - 1)));
    ++hist.counts[static_cast<std::size_t>(bin)];
  }
  return hist;
}

ImageGrid abs_rel_map(const ImageGrid& pred, const ImageGrid& gt, const EvalProtocol& protocol) {
  const Samples s = collect(pred, gt, protocol);
  ImageGrid out(gt.height(), gt.width(), 1, 0.0f);
  std::fill(out.validity().begin(), out.validity().end(), 0);
  for (std::size_t i = 0; i < s.pixels.size(); ++i) {
    out.data()[s.pixels[i]] = static_cast<float>(std::abs(s.pred[i] - s.gt[i]) / s.gt[i]);
    out.validity()[s.pixels[i]] = 1;
  }
  return out;
}

}  // namespace dscv::metrics
