#include "dscv/grid.hpp"

#include <algorithm>

#include "dscv/error.hpp"

namespace dscv {

namespace {

std::size_t checked_area(int height, int width, int channels) {
  if (height < 1 || width < 1 || channels < 1) {
    throw Error(ErrorCode::InvalidArgument, "grid dimensions must be positive");
  }
  return static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
         static_cast<std::size_t>(channels);
}

}  // namespace

Mask::Mask(int height, int width, bool fill)
    : height_(height), width_(width), data_(checked_area(height, width, 1), fill ? 1 : 0) {}

std::size_t Mask::count() const {
  return static_cast<std::size_t>(std::count_if(data_.begin(), data_.end(), [](std::uint8_t b) { return b != 0; }));
}

ImageGrid::ImageGrid(int height, int width, int channels, float fill)
    : height_(height),
      width_(width),
      channels_(channels),
      data_(checked_area(height, width, channels), fill),
      valid_(checked_area(height, width, 1), 1) {}

Mask ImageGrid::validity_mask() const {
  Mask mask(height_, width_);
  std::copy(valid_.begin(), valid_.end(), mask.data().begin());
  return mask;
}

FlowField::FlowField(int height, int width)
    : height_(height),
      width_(width),
      u_(checked_area(height, width, 1), 0.0f),
      v_(checked_area(height, width, 1), 0.0f),
      valid_(checked_area(height, width, 1), 1) {}

}  // namespace dscv
