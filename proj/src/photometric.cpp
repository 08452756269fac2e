#include "dscv/photometric.hpp"

#include <algorithm>
#include <cmath>

#include "dscv/error.hpp"
#include "dscv/sampler.hpp"

namespace dscv::photometric {

namespace {

int reflect(int i, int n) {
  if (n == 1) return 0;
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

void require_same_shape(const ImageGrid& a, const ImageGrid& b, const char* what) {
  if (!a.same_shape(b)) throw Error(ErrorCode::ShapeMismatch, std::string(what) + ": grid shapes differ");
}

// Channel-averaged SSIM per pixel, in double precision.
std::vector<double> ssim_values(const ImageGrid& a, const ImageGrid& b) {
  const int h = a.height();
  const int w = a.width();
  const int channels = a.channels();
  std::vector<double> out(a.pixel_count(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int c = 0; c < channels; ++c) {
        double sa = 0.0, sb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          const int yy = reflect(y + dy, h);
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = reflect(x + dx, w);
            const double va = a(yy, xx, c);
            const double vb = b(yy, xx, c);
            sa += va;
            sb += vb;
            saa += va * va;
            sbb += vb * vb;
            sab += va * vb;
          }
        }
        const double mu_a = sa / 9.0;
        const double mu_b = sb / 9.0;
        const double var_a = saa / 9.0 - mu_a * mu_a;
        const double var_b = sbb / 9.0 - mu_b * mu_b;
        const double cov = sab / 9.0 - mu_a * mu_b;
        const double num = (2.0 * mu_a * mu_b + kSsimC1) * (2.0 * cov + kSsimC2);
        const double den = (mu_a * mu_a + mu_b * mu_b + kSsimC1) * (var_a + var_b + kSsimC2);
        acc += num / den;
      }
      out[static_cast<std::size_t>(y) * w + x] = acc / channels;
    }
  }
  return out;
}

std::vector<double> l1_values(const ImageGrid& a, const ImageGrid& b) {
  const int channels = a.channels();
  std::vector<double> out(a.pixel_count(), 0.0);
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t p = 0; p < out.size(); ++p) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      const std::size_t i = p * channels + c;
      acc += std::abs(static_cast<double>(da[i]) - static_cast<double>(db[i]));
    }
    out[p] = acc / channels;
  }
  return out;
}

double dissimilarity(double ssim_value) { return std::clamp(1.0 - ssim_value, 0.0, 2.0); }

double photometric_term(double alpha, double ssim_value, double l1) {
  return alpha / 2.0 * dissimilarity(ssim_value) + (1.0 - alpha) * l1;
}

void require_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::InvalidArgument, "alpha must lie in [0, 1]");
}

}  // namespace

void LossConfig::validate() const {
  require_alpha(alpha_cv);
  require_alpha(alpha_photo);
  if (!(q > 0.0) || !(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "q and epsilon must be positive");
}

ImageGrid ssim(const ImageGrid& a, const ImageGrid& b) {
  require_same_shape(a, b, "ssim");
  const auto values = ssim_values(a, b);
  ImageGrid out(a.height(), a.width(), 1);
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      out(y, x) = static_cast<float>(values[static_cast<std::size_t>(y) * a.width() + x]);
      out.set_valid(y, x, a.valid(y, x) && b.valid(y, x));
    }
  }
  return out;
}

ErrorMap cost_error(const ImageGrid& warped, const ImageGrid& target, double alpha_cv) {
  require_same_shape(warped, target, "cost_error");
  require_alpha(alpha_cv);
  const auto s = ssim_values(warped, target);
  const auto l1 = l1_values(warped, target);
  ErrorMap out(target.height(), target.width(), 1);
  for (int y = 0; y < target.height(); ++y) {
    for (int x = 0; x < target.width(); ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * target.width() + x;
      out(y, x) = static_cast<float>(alpha_cv * dissimilarity(s[p]) + (1.0 - alpha_cv) * l1[p]);
      out.set_valid(y, x, warped.valid(y, x) && target.valid(y, x));
    }
  }
  return out;
}

double photometric_loss(const ImageGrid& target, const ImageGrid& synth, double alpha_photo) {
  require_same_shape(target, synth, "photometric_loss");
  require_alpha(alpha_photo);
  const auto s = ssim_values(target, synth);
  const auto l1 = l1_values(target, synth);
  double sum = 0.0;
  std::size_t n = 0;
  const auto vt = target.validity();
  const auto vs = synth.validity();
  for (std::size_t p = 0; p < s.size(); ++p) {
    if (!vt[p] || !vs[p]) continue;
    sum += photometric_term(alpha_photo, s[p], l1[p]);
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::NoValidPixels, "photometric_loss has no valid pixels");
  return sum / static_cast<double>(n);
}

double adaptive_photometric_loss(const ImageGrid& target, const ImageGrid& synth_static,
                                 const ImageGrid& synth_dynamic, double alpha_photo) {
  require_same_shape(target, synth_static, "adaptive_photometric_loss");
  require_same_shape(target, synth_dynamic, "adaptive_photometric_loss");
  require_alpha(alpha_photo);
  const auto s_static = ssim_values(target, synth_static);
  const auto s_dynamic = ssim_values(target, synth_dynamic);
  const auto l_static = l1_values(target, synth_static);
  const auto l_dynamic = l1_values(target, synth_dynamic);
  const auto vt = target.validity();
  const auto vs = synth_static.validity();
  const auto vd = synth_dynamic.validity();
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < s_static.size(); ++p) {
    if (!vt[p] || !vs[p] || !vd[p]) continue;
    sum += photometric_term(alpha_photo, std::max(s_static[p], s_dynamic[p]), std::min(l_static[p], l_dynamic[p]));
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::NoValidPixels, "adaptive_photometric_loss has no valid pixels");
  return sum / static_cast<double>(n);
}

double edge_aware_smoothness(const ImageGrid& disp, const ImageGrid& image) {
  if (!disp.same_size(image) || disp.channels() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "edge_aware_smoothness needs a single-channel disparity of the image size");
  }
  const int h = disp.height();
  const int w = disp.width();
  const int channels = image.channels();
  double mean = 0.0;
  for (float d : disp.data()) mean += d;
  mean /= static_cast<double>(disp.pixel_count());
  if (mean == 0.0) throw Error(ErrorCode::ZeroMeanDisparity, "disparity has zero mean");

  auto image_grad = [&](int y0, int x0, int y1, int x1) {
    double g = 0.0;
    for (int c = 0; c < channels; ++c) g += std::abs(static_cast<double>(image(y1, x1, c)) - image(y0, x0, c));
    return g / channels;
  };

  double sum_x = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x + 1 < w; ++x) {
      const double dd = std::abs(disp(y, x + 1) / mean - disp(y, x) / mean);
      sum_x += dd * std::exp(-image_grad(y, x, y, x + 1));
    }
  }
  double sum_y = 0.0;
  for (int y = 0; y + 1 < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dd = std::abs(disp(y + 1, x) / mean - disp(y, x) / mean);
      sum_y += dd * std::exp(-image_grad(y, x, y + 1, x));
    }
  }
  const double mean_x = w > 1 ? sum_x / (static_cast<double>(h) * (w - 1)) : 0.0;
  const double mean_y = h > 1 ? sum_y / (static_cast<double>(h - 1) * w) : 0.0;
  return mean_x + mean_y;
}

double robust_penalty(double x, double q, double epsilon) { return std::pow(std::abs(x) + epsilon, q); }

ImageGrid robust_penalty(const ImageGrid& x, double q, double epsilon) {
  ImageGrid out = x;
  for (float& v : out.data()) v = static_cast<float>(robust_penalty(v, q, epsilon));
  return out;
}

double pyramid_distillation_loss(std::span<const ImageGrid> scale_depths, const ImageGrid& final_depth, double q,
                                 double epsilon) {
  if (final_depth.channels() != 1) throw Error(ErrorCode::ShapeMismatch, "final depth must be single-channel");
  const int h = final_depth.height();
  const int w = final_depth.width();
  double total = 0.0;
  for (const ImageGrid& scale : scale_depths) {
    if (scale.channels() != 1) throw Error(ErrorCode::ShapeMismatch, "scale depth must be single-channel");
    if (scale.height() > h || scale.width() > w) {
      throw Error(ErrorCode::InvalidTarget, "scale depth is larger than the final depth");
    }
    // corner-aligned upsampling as in sampler::upsample, kept in double
    const double sx = w > 1 ? static_cast<double>(scale.width() - 1) / (w - 1) : 0.0;
    const double sy = h > 1 ? static_cast<double>(scale.height() - 1) / (h - 1) : 0.0;
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto up = sampler::sample_at(scale, x * sx, y * sy);
        if (!up || !final_depth.valid(y, x)) continue;
        sum += robust_penalty(static_cast<double>(final_depth(y, x)) - *up, q, epsilon);
        ++n;
      }
    }
    if (n == 0) throw Error(ErrorCode::NoValidPixels, "pyramid_distillation_loss has no valid pixels at a scale");
    total += sum / static_cast<double>(n);
  }
  return total;
}

}  // namespace dscv::photometric
