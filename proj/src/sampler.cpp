#include "dscv/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "dscv/error.hpp"

namespace dscv::sampler {

namespace {

struct Cell {
  int x0, x1, y0, y1;
  double ax, ay;  // fractional position inside the cell
};

// Locates the interpolation cell for a coordinate on one axis; the
// left/top cell index is the floor, except on the last sample where the
// preceding cell is used.
bool locate_axis(double c, int n, int& i0, int& i1, double& a) {
  if (!std::isfinite(c) || c < -kBorderTolerance || c > (n - 1) + kBorderTolerance) return false;
  c = std::clamp(c, 0.0, static_cast<double>(n - 1));
  i0 = static_cast<int>(std::floor(c));
  if (i0 > n - 2) i0 = std::max(n - 2, 0);
  i1 = std::min(i0 + 1, n - 1);
  a = c - i0;
  return true;
}

std::optional<Cell> locate(double x, double y, int width, int height) {
  Cell cell{};
  if (!locate_axis(x, width, cell.x0, cell.x1, cell.ax)) return std::nullopt;
  if (!locate_axis(y, height, cell.y0, cell.y1, cell.ay)) return std::nullopt;
  return cell;
}

bool taps_valid(const ImageGrid& src, const Cell& c) {
  const bool need_x1 = c.ax > 0.0;
  const bool need_y1 = c.ay > 0.0;
  if (!src.valid(c.y0, c.x0)) return false;
  if (need_x1 && !src.valid(c.y0, c.x1)) return false;
  if (need_y1 && !src.valid(c.y1, c.x0)) return false;
  if (need_x1 && need_y1 && !src.valid(c.y1, c.x1)) return false;
  return true;
}

double interpolate(const ImageGrid& src, const Cell& c, int ch) {
  const double top = src(c.y0, c.x0, ch) * (1.0 - c.ax) + src(c.y0, c.x1, ch) * c.ax;
  const double bottom = src(c.y1, c.x0, ch) * (1.0 - c.ax) + src(c.y1, c.x1, ch) * c.ax;
  return top * (1.0 - c.ay) + bottom * c.ay;
}

PointGradient gradient(const ImageGrid& src, const Cell& c, int ch) {
  const double a = src(c.y0, c.x0, ch);
  const double b = src(c.y0, c.x1, ch);
  const double cc = src(c.y1, c.x0, ch);
  const double d = src(c.y1, c.x1, ch);
  // degenerate single-sample axes have zero slope
  return {c.x1 == c.x0 ? 0.0 : (1.0 - c.ay) * (b - a) + c.ay * (d - cc),
          c.y1 == c.y0 ? 0.0 : (1.0 - c.ax) * (cc - a) + c.ax * (d - b)};
}

std::optional<Cell> usable_cell(const ImageGrid& src, double x, double y) {
  auto cell = locate(x, y, src.width(), src.height());
  if (!cell || !taps_valid(src, *cell)) return std::nullopt;
  return cell;
}

void require_coords(const SampleCoords& coords) {
  const std::size_t n = static_cast<std::size_t>(coords.height) * static_cast<std::size_t>(coords.width);
  if (coords.height < 1 || coords.width < 1 || coords.x.size() != n || coords.y.size() != n ||
      coords.valid.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "sample coordinate arrays do not match their declared size");
  }
}

}  // namespace

SampleCoords::SampleCoords(int h, int w)
    : height(h),
      width(w),
      x(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0.0),
      y(x.size(), 0.0),
      valid(x.size(), 1) {}

SampleCoords SampleCoords::identity(int h, int w) {
  SampleCoords c(h, w);
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      c.x[c.index(row, col)] = col;
      c.y[c.index(row, col)] = row;
    }
  }
  return c;
}

ImageGrid bilinear_sample(const ImageGrid& src, const SampleCoords& coords) {
  require_coords(coords);
  const int channels = src.channels();
  ImageGrid out(coords.height, coords.width, channels, 0.0f);
  for (int row = 0; row < coords.height; ++row) {
    for (int col = 0; col < coords.width; ++col) {
      const std::size_t i = coords.index(row, col);
      const auto cell = coords.valid[i] ? usable_cell(src, coords.x[i], coords.y[i]) : std::nullopt;
      if (!cell) {
        out.set_valid(row, col, false);
        continue;
      }
      for (int ch = 0; ch < channels; ++ch) out(row, col, ch) = static_cast<float>(interpolate(src, *cell, ch));
    }
  }
  return out;
}

SampleGradient bilinear_sample_grad(const ImageGrid& src, const SampleCoords& coords) {
  require_coords(coords);
  const int channels = src.channels();
  SampleGradient g{ImageGrid(coords.height, coords.width, channels, 0.0f),
                   ImageGrid(coords.height, coords.width, channels, 0.0f)};
  for (int row = 0; row < coords.height; ++row) {
    for (int col = 0; col < coords.width; ++col) {
      const std::size_t i = coords.index(row, col);
      const auto cell = coords.valid[i] ? usable_cell(src, coords.x[i], coords.y[i]) : std::nullopt;
      if (!cell) {
        g.d_dx.set_valid(row, col, false);
        g.d_dy.set_valid(row, col, false);
        continue;
      }
      for (int ch = 0; ch < channels; ++ch) {
        const PointGradient pg = gradient(src, *cell, ch);
        g.d_dx(row, col, ch) = static_cast<float>(pg.d_dx);
        g.d_dy(row, col, ch) = static_cast<float>(pg.d_dy);
      }
    }
  }
  return g;
}

std::optional<double> sample_at(const ImageGrid& src, double x, double y, int channel) {
  if (channel < 0 || channel >= src.channels()) throw Error(ErrorCode::InvalidArgument, "channel out of range");
  const auto cell = usable_cell(src, x, y);
  if (!cell) return std::nullopt;
  return interpolate(src, *cell, channel);
}

std::optional<PointGradient> sample_grad_at(const ImageGrid& src, double x, double y, int channel) {
  if (channel < 0 || channel >= src.channels()) throw Error(ErrorCode::InvalidArgument, "channel out of range");
  const auto cell = usable_cell(src, x, y);
  if (!cell) return std::nullopt;
  return gradient(src, *cell, channel);
}

ImageGrid warp(const ImageGrid& src, const FlowField& flow) {
  if (flow.width() != src.width() || flow.height() != src.height()) {
    throw Error(ErrorCode::ShapeMismatch, "flow and source grid differ in size");
  }
  SampleCoords coords(src.height(), src.width());
  for (int row = 0; row < src.height(); ++row) {
    for (int col = 0; col < src.width(); ++col) {
      const std::size_t i = coords.index(row, col);
      coords.x[i] = col + static_cast<double>(flow.u(row, col));
      coords.y[i] = row + static_cast<double>(flow.v(row, col));
      coords.valid[i] = flow.valid(row, col) ? 1 : 0;
    }
  }
  return bilinear_sample(src, coords);
}

ImageGrid upsample(const ImageGrid& src, int target_h, int target_w) {
  if (target_h < src.height() || target_w < src.width()) {
    throw Error(ErrorCode::InvalidTarget, "upsample target is smaller than the source");
  }
  if (target_h == src.height() && target_w == src.width()) return src;
  const double sx = target_w > 1 ? static_cast<double>(src.width() - 1) / (target_w - 1) : 0.0;
  const double sy = target_h > 1 ? static_cast<double>(src.height() - 1) / (target_h - 1) : 0.0;
  SampleCoords coords(target_h, target_w);
  for (int row = 0; row < target_h; ++row) {
    for (int col = 0; col < target_w; ++col) {
      coords.x[coords.index(row, col)] = col * sx;
      coords.y[coords.index(row, col)] = row * sy;
    }
  }
  return bilinear_sample(src, coords);
}

}  // namespace dscv::sampler
