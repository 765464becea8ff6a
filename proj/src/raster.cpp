#include "drape/raster.hpp"

#include <algorithm>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include <png.h>

#include "drape/error.hpp"

namespace drape {

std::size_t count_set(const Mask &m) {
  return static_cast<std::size_t>(std::count_if(m.pixels().begin(), m.pixels().end(), [](auto v) { return v != 0; }));
}

Mask alpha_support(const Image &img) {
  Mask m(img.width(), img.height());
  auto src = img.pixels();
  auto dst = m.pixels();
  for (std::size_t i = 0; i < src.size(); ++i)
    dst[i] = src[i].a != 0 ? 1 : 0;
  return m;
}

namespace {

struct PngImage {
  png_image image{};
  PngImage() { image.version = PNG_IMAGE_VERSION; }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage &) = delete;
  PngImage &operator=(const PngImage &) = delete;
};

[[noreturn]] void fail(const std::string &what, const png_image &img) {
  throw ValidationError(what + ": " + img.message);
}

Image finish_rgba(PngImage &png, const std::string &label) {
  png.image.format = PNG_FORMAT_RGBA;
  Image out(static_cast<int>(png.image.width), static_cast<int>(png.image.height));
  if (!png_image_finish_read(&png.image, nullptr, out.pixels().data(), 0, nullptr))
    fail(label, png.image);
  return out;
}

void fill_png_image(png_image &img, int width, int height, png_uint_32 format) {
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(width);
  img.height = static_cast<png_uint_32>(height);
  img.format = format;
}

} // namespace

Image read_png(const std::filesystem::path &path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.string().c_str()))
    fail("cannot read PNG " + path.string(), png.image);
  return finish_rgba(png, "cannot decode PNG " + path.string());
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size()))
    fail("cannot decode PNG buffer", png.image);
  return finish_rgba(png, "cannot decode PNG buffer");
}

void write_png(const std::filesystem::path &path, const Image &img) {
  png_image out{};
  fill_png_image(out, img.width(), img.height(), PNG_FORMAT_RGBA);
  if (!png_image_write_to_file(&out, path.string().c_str(), 0, img.pixels().data(), 0, nullptr))
    throw RenderError("cannot write PNG " + path.string() + ": " + out.message);
}

std::vector<std::uint8_t> encode_png(const Image &img) {
  png_image out{};
  fill_png_image(out, img.width(), img.height(), PNG_FORMAT_RGBA);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&out, nullptr, &size, 0, img.pixels().data(), 0, nullptr))
    throw RenderError(std::string("cannot size PNG buffer: ") + out.message);
  std::vector<std::uint8_t> buf(size);
  if (!png_image_write_to_memory(&out, buf.data(), &size, 0, img.pixels().data(), 0, nullptr))
    throw RenderError(std::string("cannot encode PNG: ") + out.message);
  buf.resize(size);
  return buf;
}

Mask read_mask_png(const std::filesystem::path &path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.string().c_str()))
    fail("cannot read mask " + path.string(), png.image);
  const bool has_alpha = (png.image.format & PNG_FORMAT_FLAG_ALPHA) != 0;
  const Image rgba = finish_rgba(png, "cannot decode mask " + path.string());
  Mask m(rgba.width(), rgba.height());
  auto src = rgba.pixels();
  auto dst = m.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Rgba p = src[i];
    dst[i] = (has_alpha ? p.a != 0 : (p.r | p.g | p.b) != 0) ? 1 : 0;
  }
  return m;
}

void write_mask_png(const std::filesystem::path &path, const Mask &mask) {
  std::vector<std::uint8_t> gray(mask.size());
  std::transform(mask.pixels().begin(), mask.pixels().end(), gray.begin(),
                 [](std::uint8_t v) { return static_cast<std::uint8_t>(v ? 255 : 0); });
  png_image out{};
  fill_png_image(out, mask.width(), mask.height(), PNG_FORMAT_GRAY);
  if (!png_image_write_to_file(&out, path.string().c_str(), 0, gray.data(), 0, nullptr))
    throw RenderError("cannot write mask " + path.string() + ": " + out.message);
}

namespace {

png_image indexed_header(const Raster<std::uint8_t> &indices, std::span<const Rgba> palette) {
  if (palette.empty() || palette.size() > 256)
    throw RenderError("palette must hold 1..256 entries");
  for (auto v : indices.pixels())
    if (v >= palette.size())
      throw RenderError("class index " + std::to_string(v) + " outside palette");
  png_image out{};
  fill_png_image(out, indices.width(), indices.height(), PNG_FORMAT_RGBA_COLORMAP);
  out.colormap_entries = static_cast<png_uint_32>(palette.size());
  return out;
}

struct FileCloser {
  void operator()(std::FILE *f) const { std::fclose(f); }
};

} // namespace

void write_indexed_png(const std::filesystem::path &path, const Raster<std::uint8_t> &indices,
                       std::span<const Rgba> palette) {
  png_image out = indexed_header(indices, palette);
  if (!png_image_write_to_file(&out, path.string().c_str(), 0, indices.pixels().data(), 0, palette.data()))
    throw RenderError("cannot write indexed PNG " + path.string() + ": " + out.message);
}

std::vector<std::uint8_t> encode_indexed_png(const Raster<std::uint8_t> &indices, std::span<const Rgba> palette) {
  png_image out = indexed_header(indices, palette);
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&out, nullptr, &size, 0, indices.pixels().data(), 0, palette.data()))
    throw RenderError(std::string("cannot size indexed PNG: ") + out.message);
  std::vector<std::uint8_t> buf(size);
  if (!png_image_write_to_memory(&out, buf.data(), &size, 0, indices.pixels().data(), 0, palette.data()))
    throw RenderError(std::string("cannot encode indexed PNG: ") + out.message);
  buf.resize(size);
  return buf;
}

Raster<std::uint8_t> read_indexed_png(const std::filesystem::path &path) {
  // The simplified API remaps palettes, so indices are read with the low-level API.
  std::unique_ptr<std::FILE, FileCloser> file(std::fopen(path.string().c_str(), "rb"));
  if (!file)
    throw ValidationError("cannot open indexed PNG " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("libpng initialization failed");
  }
  Raster<std::uint8_t> out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("cannot decode indexed PNG " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  const auto depth = png_get_bit_depth(png, info);
  if ((color != PNG_COLOR_TYPE_PALETTE && color != PNG_COLOR_TYPE_GRAY) || depth > 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ValidationError("indexed PNG must be palette or 8-bit gray: " + path.string());
  }
  if (depth < 8)
    png_set_packing(png);
  png_read_update_info(png, info);
  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  out = Raster<std::uint8_t>(w, h);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
    rows[static_cast<std::size_t>(y)] = out.row(y).data();
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

} // namespace drape
