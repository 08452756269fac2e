#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dscv {

/// Dense H x W boolean grid. Used for validity, occlusion and region masks.
class Mask {
public:
  Mask() = default;
  Mask(int height, int width, bool fill = false);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  bool operator()(int y, int x) const { return data_[index(y, x)] != 0; }
  void set(int y, int x, bool value) { data_[index(y, x)] = value ? 1 : 0; }

  std::span<std::uint8_t> data() noexcept { return data_; }
  std::span<const std::uint8_t> data() const noexcept { return data_; }

  std::size_t count() const;
  bool same_size(const Mask& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Mask&, const Mask&) = default;

private:
  std::size_t index(int y, int x) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> data_;
};

/// H x W x C single-precision grid with a per-pixel validity mask.
///
/// Images, feature maps, depth maps and per-pixel error maps all share this
/// representation. Channels are interleaved (HWC). Pixel centres sit at
/// integer coordinates with the origin at the top-left pixel.
class ImageGrid {
public:
  ImageGrid() = default;
  ImageGrid(int height, int width, int channels = 1, float fill = 0.0f);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return valid_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float& operator()(int y, int x, int c = 0) { return data_[index(y, x, c)]; }
  float operator()(int y, int x, int c = 0) const { return data_[index(y, x, c)]; }

  bool valid(int y, int x) const { return valid_[pixel(y, x)] != 0; }
  void set_valid(int y, int x, bool value) { valid_[pixel(y, x)] = value ? 1 : 0; }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<std::uint8_t> validity() noexcept { return valid_; }
  std::span<const std::uint8_t> validity() const noexcept { return valid_; }

  Mask validity_mask() const;

  bool same_shape(const ImageGrid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }
  bool same_size(const ImageGrid& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const ImageGrid&, const ImageGrid&) = default;

private:
  std::size_t pixel(int y, int x) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  std::size_t index(int y, int x, int c) const noexcept {
    return pixel(y, x) * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(c);
  }

  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
  std::vector<std::uint8_t> valid_;
};

/// Per-pixel 2D displacement in pixels (camera, residual or total flow).
class FlowField {
public:
  FlowField() = default;
  FlowField(int height, int width);  // zero flow, all valid

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept { return u_.size(); }

  float& u(int y, int x) { return u_[pixel(y, x)]; }
  float u(int y, int x) const { return u_[pixel(y, x)]; }
  float& v(int y, int x) { return v_[pixel(y, x)]; }
  float v(int y, int x) const { return v_[pixel(y, x)]; }
  bool valid(int y, int x) const { return valid_[pixel(y, x)] != 0; }
  void set_valid(int y, int x, bool value) { valid_[pixel(y, x)] = value ? 1 : 0; }

  std::span<float> u_data() noexcept { return u_; }
  std::span<const float> u_data() const noexcept { return u_; }
  std::span<float> v_data() noexcept { return v_; }
  std::span<const float> v_data() const noexcept { return v_; }
  std::span<std::uint8_t> validity() noexcept { return valid_; }
  std::span<const std::uint8_t> validity() const noexcept { return valid_; }

  bool same_size(const FlowField& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const FlowField&, const FlowField&) = default;

private:
  std::size_t pixel(int y, int x) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<float> u_;
  std::vector<float> v_;
  std::vector<std::uint8_t> valid_;
};

}  // namespace dscv
