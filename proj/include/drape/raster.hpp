#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

namespace drape {

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;
  friend constexpr bool operator==(Rgba, Rgba) = default;
};

/// Row-major 2D grid of pixels.
template <typename T> class Raster {
public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height), data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 0 || height < 0)
      throw std::invalid_argument("negative raster size");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }
  bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

  T &operator()(int x, int y) { return data_[index(x, y)]; }
  const T &operator()(int x, int y) const { return data_[index(x, y)]; }

  std::span<T> row(int y) { return {data_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int y) const { return {data_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<T> pixels() { return data_; }
  std::span<const T> pixels() const { return data_; }

  friend bool operator==(const Raster &, const Raster &) = default;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Image = Raster<Rgba>;
/// Binary mask: 0 or 1 per pixel.
using Mask = Raster<std::uint8_t>;

struct CanvasSize {
  int width = 0;
  int height = 0;
  friend constexpr bool operator==(CanvasSize, CanvasSize) = default;
};

template <typename T> CanvasSize size_of(const Raster<T> &r) { return {r.width(), r.height()}; }

std::size_t count_set(const Mask &m);

/// Nonzero-alpha support of an image.
Mask alpha_support(const Image &img);

// PNG I/O. Color images are always RGBA 8-bit with straight alpha.
Image read_png(const std::filesystem::path &path);
void write_png(const std::filesystem::path &path, const Image &img);
std::vector<std::uint8_t> encode_png(const Image &img);
Image decode_png(std::span<const std::uint8_t> bytes);

/// Masks: any nonzero gray (or alpha, for RGBA files) reads as set; written as 0/255 gray.
Mask read_mask_png(const std::filesystem::path &path);
void write_mask_png(const std::filesystem::path &path, const Mask &mask);

/// Palette PNGs whose indices are stored verbatim (class-id rasters).
Raster<std::uint8_t> read_indexed_png(const std::filesystem::path &path);
void write_indexed_png(const std::filesystem::path &path, const Raster<std::uint8_t> &indices,
                       std::span<const Rgba> palette);
std::vector<std::uint8_t> encode_indexed_png(const Raster<std::uint8_t> &indices, std::span<const Rgba> palette);

} // namespace drape
