#include "dscv/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "dscv/error.hpp"

namespace dscv::io {

namespace fs = std::filesystem;
using costvolume::CostVolume;
using costvolume::DepthHypothesisSet;

namespace {

constexpr std::int64_t kMaxDimension = 1 << 16;
constexpr std::int64_t kMaxElements = std::int64_t{1} << 30;

std::vector<std::uint8_t> slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for reading");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void dump(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "short write to '" + path.string() + "'");
}

class Writer {
public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void raw(std::string_view s) { bytes.insert(bytes.end(), s.begin(), s.end()); }

  std::vector<std::uint8_t> bytes;
};

class Reader {
public:
  Reader(const std::vector<std::uint8_t>& bytes, const fs::path& path) : bytes_(bytes), path_(path) {}

  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(ErrorCode::TruncatedFile, "'" + path_.string() + "' ends early");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string raw(std::size_t n) {
    need(n);
    std::string s(bytes_.begin() + static_cast<std::ptrdiff_t>(pos_), bytes_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  std::uint8_t byte() {
    need(1);
    return bytes_[pos_++];
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

private:
  const std::vector<std::uint8_t>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

void check_dimensions(std::int64_t a, std::int64_t b, std::int64_t c, const fs::path& path) {
  if (a < 1 || b < 1 || c < 1 || a > kMaxDimension || b > kMaxDimension || c > kMaxDimension ||
      a * b * c > kMaxElements) {
    throw Error(ErrorCode::DimensionOverflow, "'" + path.string() + "' declares implausible dimensions");
  }
}

}  // namespace

void write_flo(const fs::path& path, const FlowField& flow) {
  Writer w;
  w.f32(kFloSentinel);
  w.i32(flow.width());
  w.i32(flow.height());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const bool ok = flow.valid(y, x);
      w.f32(ok ? flow.u(y, x) : kUnknownFlow);
      w.f32(ok ? flow.v(y, x) : kUnknownFlow);
    }
  }
  dump(path, w.bytes);
}

FlowField read_flo(const fs::path& path) {
  const auto bytes = slurp(path);
  Reader r(bytes, path);
  if (r.f32() != kFloSentinel) throw Error(ErrorCode::BadMagic, "'" + path.string() + "' is not a .flo file");
  const std::int32_t width = r.i32();
  const std::int32_t height = r.i32();
  check_dimensions(width, height, 1, path);
  FlowField flow(height, width);
  r.need(static_cast<std::size_t>(width) * height * 8);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const float u = r.f32();
      const float v = r.f32();
      const bool ok = std::isfinite(u) && std::isfinite(v) && std::abs(u) < 1e9f && std::abs(v) < 1e9f;
      flow.u(y, x) = ok ? u : 0.0f;
      flow.v(y, x) = ok ? v : 0.0f;
      flow.set_valid(y, x, ok);
    }
  }
  return flow;
}

void write_pfm(const fs::path& path, const ImageGrid& grid) {
  if (grid.channels() != 1) throw Error(ErrorCode::InvalidArgument, "PFM output supports single-channel grids only");
  Writer w;
  w.raw("Pf\n" + std::to_string(grid.width()) + " " + std::to_string(grid.height()) + "\n-1\n");
  for (int y = grid.height() - 1; y >= 0; --y) {
    for (int x = 0; x < grid.width(); ++x) {
      w.f32(grid.valid(y, x) ? grid(y, x) : std::numeric_limits<float>::quiet_NaN());
    }
  }
  dump(path, w.bytes);
}

ImageGrid read_pfm(const fs::path& path) {
  const auto bytes = slurp(path);
  // Header: three whitespace-separated tokens after the magic, then exactly
  // one whitespace byte before the raster.
  std::size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) ++pos;
    if (start == pos) throw Error(ErrorCode::BadHeader, "'" + path.string() + "' has an incomplete PFM header");
    return std::string(bytes.begin() + static_cast<std::ptrdiff_t>(start), bytes.begin() + static_cast<std::ptrdiff_t>(pos));
  };
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != 'f' || (bytes.size() > 2 && !std::isspace(bytes[2]))) {
    throw Error(ErrorCode::BadHeader, "'" + path.string() + "' is not a single-channel PFM");
  }
  pos = 2;
  long long width = 0, height = 0;
  double scale = 0.0;
  try {
    std::size_t used = 0;
    const std::string ws = token();
    width = std::stoll(ws, &used);
    if (used != ws.size()) throw std::invalid_argument(ws);
    const std::string hs = token();
    height = std::stoll(hs, &used);
    if (used != hs.size()) throw std::invalid_argument(hs);
    const std::string ss = token();
    scale = std::stod(ss, &used);
    if (used != ss.size()) throw std::invalid_argument(ss);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::BadHeader, "'" + path.string() + "' has a malformed PFM header");
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw Error(ErrorCode::BadHeader, "PFM scale must be non-zero");
  if (width < 1 || height < 1 || width > kMaxDimension || height > kMaxDimension) {
    throw Error(ErrorCode::BadHeader, "'" + path.string() + "' declares invalid PFM dimensions");
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw Error(ErrorCode::TruncatedFile, "'" + path.string() + "' ends inside the PFM header");
  }
  ++pos;
  const bool big_endian = scale > 0.0;
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - pos < count * 4) throw Error(ErrorCode::TruncatedFile, "'" + path.string() + "' ends early");

  ImageGrid grid(static_cast<int>(height), static_cast<int>(width), 1);
  for (long long row = 0; row < height; ++row) {
    const int y = static_cast<int>(height - 1 - row);
    for (int x = 0; x < width; ++x) {
      std::array<std::uint8_t, 4> b{};
      std::memcpy(b.data(), bytes.data() + pos, 4);
      pos += 4;
      if (big_endian) std::reverse(b.begin(), b.end());
      std::uint32_t bits = 0;
      for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(b[static_cast<std::size_t>(i)]) << (8 * i);
      const float v = std::bit_cast<float>(bits);
      const bool ok = std::isfinite(v);
      grid(y, x) = ok ? v : 0.0f;
      grid.set_valid(y, x, ok);
    }
  }
  return grid;
}

void write_dscv(const fs::path& path, const CostVolume& cv) {
  Writer w;
  w.raw("DSCV");
  w.u32(kDscvVersion);
  w.u32(static_cast<std::uint32_t>(cv.bins()));
  w.u32(static_cast<std::uint32_t>(cv.height()));
  w.u32(static_cast<std::uint32_t>(cv.width()));
  for (float d : cv.hypotheses().values()) w.f32(d);
  for (float c : cv.costs()) w.f32(c);
  const auto valid = cv.validity();
  std::vector<std::uint8_t> packed((valid.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < valid.size(); ++i) {
    if (valid[i]) packed[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
  }
  w.bytes.insert(w.bytes.end(), packed.begin(), packed.end());
  dump(path, w.bytes);
}

CostVolume read_dscv(const fs::path& path) {
  const auto bytes = slurp(path);
  Reader r(bytes, path);
  if (r.raw(4) != "DSCV") throw Error(ErrorCode::BadMagic, "'" + path.string() + "' is not a DSCV file");
  const std::uint32_t version = r.u32();
  if (version != kDscvVersion) {
    throw Error(ErrorCode::VersionMismatch, "DSCV version " + std::to_string(version) + " is not supported");
  }
  const std::uint32_t n = r.u32();
  const std::uint32_t h = r.u32();
  const std::uint32_t w = r.u32();
  check_dimensions(n, h, w, path);
  std::vector<float> depths(n);
  for (auto& d : depths) d = r.f32();
  const std::size_t total = static_cast<std::size_t>(n) * h * w;
  r.need(total * 4 + (total + 7) / 8);
  CostVolume cv(DepthHypothesisSet(std::move(depths)), static_cast<int>(h), static_cast<int>(w));
  for (float& c : cv.costs()) c = r.f32();
  auto valid = cv.validity();
  std::uint8_t current = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (i % 8 == 0) current = r.byte();
    valid[i] = (current >> (i % 8)) & 1u;
  }
  return cv;
}

void write_dsfw(const fs::path& path, const fusion::FusionWeights& weights) {
  Writer w;
  w.raw("DSFW");
  w.u32(kDsfwVersion);
  w.u32(static_cast<std::uint32_t>(weights.bins()));
  for (float v : weights.weights()) w.f32(v);
  for (float v : weights.biases()) w.f32(v);
  dump(path, w.bytes);
}

fusion::FusionWeights read_dsfw(const fs::path& path) {
  const auto bytes = slurp(path);
  Reader r(bytes, path);
  if (r.raw(4) != "DSFW") throw Error(ErrorCode::BadMagic, "'" + path.string() + "' is not a DSFW file");
  const std::uint32_t version = r.u32();
  if (version != kDsfwVersion) {
    throw Error(ErrorCode::VersionMismatch, "DSFW version " + std::to_string(version) + " is not supported");
  }
  const std::uint32_t n = r.u32();
  check_dimensions(n, 2 * static_cast<std::int64_t>(n), n, path);
  r.need((static_cast<std::size_t>(n) * 2 * n + n) * 4);
  std::vector<float> weights(static_cast<std::size_t>(n) * 2 * n);
  for (float& v : weights) v = r.f32();
  std::vector<float> biases(n);
  for (float& v : biases) v = r.f32();
  return {static_cast<int>(n), std::move(weights), std::move(biases)};
}

namespace {

void write_png8(const fs::path& path, int height, int width, int channels, const std::vector<std::uint8_t>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::IoError, "cannot write PNG '" + path.string() + "': " + msg);
  }
}

std::vector<std::uint8_t> read_png8(const fs::path& path, int& height, int& width, bool rgb) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::IoError, "cannot read PNG '" + path.string() + "': " + msg);
  }
  image.format = rgb ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::IoError, "cannot decode PNG '" + path.string() + "': " + msg);
  }
  height = static_cast<int>(image.height);
  width = static_cast<int>(image.width);
  return pixels;
}

std::uint8_t quantise(float v) {
  const float c = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
  return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

}  // namespace

void write_mask_png(const fs::path& path, const Mask& mask) {
  std::vector<std::uint8_t> pixels(mask.size());
  std::transform(mask.data().begin(), mask.data().end(), pixels.begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b ? 255 : 0); });
  write_png8(path, mask.height(), mask.width(), 1, pixels);
}

Mask read_mask_png(const fs::path& path) {
  int h = 0, w = 0;
  const auto pixels = read_png8(path, h, w, false);
  Mask mask(h, w);
  std::transform(pixels.begin(), pixels.end(), mask.data().begin(),
                 [](std::uint8_t b) { return static_cast<std::uint8_t>(b >= 128 ? 1 : 0); });
  return mask;
}

void write_image_png(const fs::path& path, const ImageGrid& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw Error(ErrorCode::InvalidArgument, "PNG output supports 1 or 3 channels");
  }
  std::vector<std::uint8_t> pixels(image.data().size());
  std::transform(image.data().begin(), image.data().end(), pixels.begin(), quantise);
  write_png8(path, image.height(), image.width(), image.channels(), pixels);
}

ImageGrid read_image_png(const fs::path& path) {
  int h = 0, w = 0;
  const auto pixels = read_png8(path, h, w, false);
  ImageGrid image(h, w, 1);
  std::transform(pixels.begin(), pixels.end(), image.data().begin(),
                 [](std::uint8_t b) { return static_cast<float>(b) / 255.0f; });
  return image;
}

ImageGrid read_image(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pfm") return read_pfm(path);
  if (ext == ".png") return read_image_png(path);
  throw Error(ErrorCode::InvalidArgument, "unsupported image extension '" + ext + "'");
}

namespace {

// Middlebury colour wheel: RY, YG, GC, CB, BM, MR segments.
std::vector<std::array<double, 3>> make_color_wheel() {
  constexpr int kRY = 15, kYG = 6, kGC = 4, kCB = 11, kBM = 13, kMR = 6;
  std::vector<std::array<double, 3>> wheel;
  for (int i = 0; i < kRY; ++i) wheel.push_back({255.0, 255.0 * i / kRY, 0.0});
  for (int i = 0; i < kYG; ++i) wheel.push_back({255.0 - 255.0 * i / kYG, 255.0, 0.0});
  for (int i = 0; i < kGC; ++i) wheel.push_back({0.0, 255.0, 255.0 * i / kGC});
  for (int i = 0; i < kCB; ++i) wheel.push_back({0.0, 255.0 - 255.0 * i / kCB, 255.0});
  for (int i = 0; i < kBM; ++i) wheel.push_back({255.0 * i / kBM, 0.0, 255.0});
  for (int i = 0; i < kMR; ++i) wheel.push_back({255.0, 0.0, 255.0 - 255.0 * i / kMR});
  return wheel;
}

}  // namespace

ImageGrid flow_to_color(const FlowField& flow, double max_magnitude) {
  static const auto wheel = make_color_wheel();
  const int ncols = static_cast<int>(wheel.size());
  double norm = max_magnitude;
  if (!(norm > 0.0)) {
    norm = 0.0;
    for (int y = 0; y < flow.height(); ++y) {
      for (int x = 0; x < flow.width(); ++x) {
        if (flow.valid(y, x)) norm = std::max(norm, std::hypot(static_cast<double>(flow.u(y, x)), flow.v(y, x)));
      }
    }
    if (norm == 0.0) norm = 1.0;
  }
  ImageGrid out(flow.height(), flow.width(), 3, 0.0f);
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!flow.valid(y, x)) continue;
      const double u = flow.u(y, x) / norm;
      const double v = flow.v(y, x) / norm;
      const double rad = std::min(1.0, std::hypot(u, v));
      const double angle = std::atan2(-v, -u) / std::numbers::pi;
      const double fk = (angle + 1.0) / 2.0 * (ncols - 1);
      const int k0 = static_cast<int>(std::floor(fk));
      const int k1 = (k0 + 1) % ncols;
      const double f = fk - k0;
      for (int c = 0; c < 3; ++c) {
        const double col = ((1.0 - f) * wheel[static_cast<std::size_t>(k0)][static_cast<std::size_t>(c)] +
                            f * wheel[static_cast<std::size_t>(k1)][static_cast<std::size_t>(c)]) /
                           255.0;
        out(y, x, c) = static_cast<float>(1.0 - rad * (1.0 - col));
      }
    }
  }
  return out;
}

}  // namespace dscv::io
