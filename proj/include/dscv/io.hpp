#pragma once

#include <filesystem>

#include "dscv/costvolume.hpp"
#include "dscv/fusion.hpp"
#include "dscv/grid.hpp"

namespace dscv::io {

/// Middlebury .flo: float sentinel 202021.25, int32 width, int32 height, then
/// row-major interleaved (u, v) float32; all little-endian. Invalid pixels are
/// written with the 1e10 "unknown flow" marker and read back as invalid with
/// zero flow.
inline constexpr float kFloSentinel = 202021.25f;
inline constexpr float kUnknownFlow = 1e10f;
void write_flo(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flo(const std::filesystem::path& path);

/// Single-channel PFM ("Pf"). Writes little-endian (scale -1) with bottom-up
/// rows; reads either endianness. Invalid pixels are stored as NaN and any
/// non-finite sample reads back as an invalid zero.
void write_pfm(const std::filesystem::path& path, const ImageGrid& grid);
ImageGrid read_pfm(const std::filesystem::path& path);

/// DSCV cost volume: "DSCV", u32 version = 1, u32 N, H, W, N float32 depths,
/// N*H*W float32 costs (bin-major), then the validity bits packed LSB-first in
/// the same order; all little-endian.
inline constexpr std::uint32_t kDscvVersion = 1;
void write_dscv(const std::filesystem::path& path, const costvolume::CostVolume& cv);
costvolume::CostVolume read_dscv(const std::filesystem::path& path);

/// DSFW fusion weights: "DSFW", u32 version = 1, u32 N, N x 2N float32 weights
/// (row-major), N float32 biases; all little-endian.
inline constexpr std::uint32_t kDsfwVersion = 1;
void write_dsfw(const std::filesystem::path& path, const fusion::FusionWeights& weights);
fusion::FusionWeights read_dsfw(const std::filesystem::path& path);

/// 8-bit PNG helpers. Masks are stored as 0/255 grayscale and read back with a
/// >= 128 threshold. Images are clamped to [0, 1] and quantised.
void write_mask_png(const std::filesystem::path& path, const Mask& mask);
Mask read_mask_png(const std::filesystem::path& path);
void write_image_png(const std::filesystem::path& path, const ImageGrid& image);
ImageGrid read_image_png(const std::filesystem::path& path);

/// Reads an image from .pfm or .png depending on the extension.
ImageGrid read_image(const std::filesystem::path& path);

/// Middlebury colour-wheel rendering of a flow field (3 channels in [0, 1]).
/// Magnitudes are normalised by max_magnitude, or by the largest valid
/// magnitude when max_magnitude <= 0. Invalid pixels are black.
ImageGrid flow_to_color(const FlowField& flow, double max_magnitude = 0.0);

}  // namespace dscv::io
