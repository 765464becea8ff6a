#include "drape/warp.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "drape/error.hpp"

namespace drape {

namespace {

struct Sampler {
  const Image &image;
  const Mask &mask;

  bool covered(int x, int y) const { return mask.in_bounds(x, y) && mask(x, y) != 0; }

  // (u, v) in garment-image normalized coordinates.
  Rgba sample(double u, double v) const {
    const double fx = u * image.width();
    const double fy = v * image.height();
    if (!(fx >= 0.0 && fy >= 0.0 && fx < image.width() && fy < image.height()))
      return {};
    if (!covered(static_cast<int>(fx), static_cast<int>(fy)))
      return {};

    // Bilinear over the in-mask neighbours only, weights renormalized, so
    // every output is a convex combination of at most four source pixels.
    const double gx = fx - 0.5;
    const double gy = fy - 0.5;
    const int x0 = static_cast<int>(std::floor(gx));
    const int y0 = static_cast<int>(std::floor(gy));
    const double tx = gx - x0;
    const double ty = gy - y0;
    const double w[4] = {(1 - tx) * (1 - ty), tx * (1 - ty), (1 - tx) * ty, tx * ty};
    const int xs[4] = {x0, x0 + 1, x0, x0 + 1};
    const int ys[4] = {y0, y0, y0 + 1, y0 + 1};
    double acc[4] = {0, 0, 0, 0};
    double total = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (w[k] <= 0.0 || !covered(xs[k], ys[k]))
        continue;
      const Rgba p = image(xs[k], ys[k]);
      acc[0] += w[k] * p.r;
      acc[1] += w[k] * p.g;
      acc[2] += w[k] * p.b;
      acc[3] += w[k] * p.a;
      total += w[k];
    }
    if (total <= 0.0)
      return image(static_cast<int>(fx), static_cast<int>(fy));
    auto q = [&](double v) { return static_cast<std::uint8_t>(std::clamp(std::floor(v / total + 0.5), 0.0, 255.0)); };
    return {q(acc[0]), q(acc[1]), q(acc[2]), q(acc[3])};
  }
};

void rasterize_rows(const TpsWarp &backward, const Sampler &sampler, Image &out, int row_begin, int row_end) {
  const int w = out.width();
  const int h = out.height();
  const std::size_t n = backward.sites.size();
  const auto &aff = backward.affine;
  std::vector<double> wx(n), wy(n), sx(n), sy(n);
  for (std::size_t i = 0; i < n; ++i) {
    wx[i] = backward.weights(static_cast<Eigen::Index>(i), 0);
    wy[i] = backward.weights(static_cast<Eigen::Index>(i), 1);
    sx[i] = backward.sites[i].x;
    sy[i] = backward.sites[i].y;
  }
  for (int py = row_begin; py < row_end; ++py) {
    const double y = (py + 0.5) / h;
    auto row = out.row(py);
    for (int px = 0; px < w; ++px) {
      const double x = (px + 0.5) / w;
      double u = aff(0, 0) + aff(0, 1) * x + aff(0, 2) * y;
      double v = aff(1, 0) + aff(1, 1) * x + aff(1, 2) * y;
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = x - sx[i];
        const double dy = y - sy[i];
        const double k = tps_kernel_sq(dx * dx + dy * dy);
        u += wx[i] * k;
        v += wy[i] * k;
      }
      row[static_cast<std::size_t>(px)] = sampler.sample(u, v);
    }
  }
}

double polyline_x_at(const std::vector<Vec2> &line, double y) {
  if (y <= line.front().y)
    return line.front().x;
  if (y >= line.back().y)
    return line.back().x;
  auto it = std::upper_bound(line.begin(), line.end(), y, [](double v, const Vec2 &p) { return v < p.y; });
  const Vec2 b = *it;
  const Vec2 a = *(it - 1);
  const double t = (y - a.y) / (b.y - a.y);
  return a.x + t * (b.x - a.x);
}

} // namespace

WarpedGarment warp_image(const GarmentAsset &asset, const ControlPointSet &on_body, CanvasSize canvas,
                         const WarpOptions &options) {
  if (canvas.width <= 0 || canvas.height <= 0)
    throw RenderError("warp: canvas must be non-empty");
  if (size_of(asset.image) != size_of(asset.mask))
    throw RenderError(fmt::format("warp: garment \"{}\" image and mask sizes differ", asset.meta.id));

  std::vector<Vec2> body, garment;
  const PresenceMask shared = asset.source_points.present & on_body.present;
  for (std::size_t i = 0; i < kPointCount; ++i)
    if (shared.test(i)) {
      body.push_back(on_body.coords[i]);
      garment.push_back(asset.source_points.coords[i]);
    }
  if (body.size() < 3)
    throw RenderError(fmt::format("warp: garment \"{}\" has {} shared control points, need at least 3",
                                  asset.meta.id, body.size()));

  WarpedGarment out;
  out.backward.push_back(fit_tps(body, garment, options.lambda));
  out.forward.push_back(fit_tps(garment, body, options.lambda));
  out.image = Image(canvas.width, canvas.height);

  const Sampler sampler{asset.image, asset.mask};
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, canvas.height);
  if (threads == 1) {
    rasterize_rows(out.backward.front(), sampler, out.image, 0, canvas.height);
  } else {
    std::vector<std::jthread> pool;
    const int chunk = (canvas.height + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(canvas.height, begin + chunk);
      if (begin < end)
        pool.emplace_back([&, begin, end] { rasterize_rows(out.backward.front(), sampler, out.image, begin, end); });
    }
  }
  out.mask = alpha_support(out.image);
  return out;
}

std::pair<GarmentAsset, GarmentAsset> split_garment(const GarmentAsset &asset, const ControlPointSchema &schema) {
  const auto &line = asset.split_polyline;
  const auto &id = asset.meta.id;
  if (line.size() < 2)
    throw ValidationError(fmt::format("split: garment \"{}\" has no split polyline", id));
  for (std::size_t i = 1; i < line.size(); ++i)
    if (!(line[i].y > line[i - 1].y))
      throw ValidationError(fmt::format("split: garment \"{}\" polyline y must strictly increase", id));

  const int w = asset.mask.width();
  const int h = asset.mask.height();
  int top = h, bottom = -1;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (asset.mask(x, y)) {
        top = std::min(top, y);
        bottom = std::max(bottom, y);
      }
  if (bottom < 0)
    throw ValidationError(fmt::format("split: garment \"{}\" mask is empty", id));
  if (line.front().y > (top + 0.5) / h || line.back().y < (bottom + 0.5) / h)
    throw ValidationError(fmt::format("split: polyline of garment \"{}\" does not span the mask vertically", id));

  GarmentAsset left = asset;
  GarmentAsset right = asset;
  left.meta.id = id + "#left";
  right.meta.id = id + "#right";
  for (int y = 0; y < h; ++y) {
    const double cut = polyline_x_at(line, (y + 0.5) / h);
    for (int x = 0; x < w; ++x) {
      const bool on_left = (x + 0.5) / w < cut;
      GarmentAsset &drop = on_left ? right : left;
      drop.mask(x, y) = 0;
      drop.image(x, y) = Rgba{};
    }
  }

  for (const PointDef &p : schema.points()) {
    const auto i = static_cast<std::size_t>(p.id);
    const bool shared = p.side == Side::center && p.shared_on_split;
    left.source_points.present.set(i, asset.source_points.present.test(i) && (p.side == Side::left || shared));
    right.source_points.present.set(i, asset.source_points.present.test(i) && (p.side == Side::right || shared));
  }
  return {std::move(left), std::move(right)};
}

void composite_over(Image &dst, const Image &src) {
  if (size_of(dst) != size_of(src))
    throw RenderError(fmt::format("composite: {}x{} over {}x{}", src.width(), src.height(), dst.width(), dst.height()));
  auto d = dst.pixels();
  auto s = src.pixels();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Rgba top = s[i];
    if (top.a == 0)
      continue;
    if (top.a == 255) {
      d[i] = top;
      continue;
    }
    const Rgba bottom = d[i];
    const double at = top.a / 255.0;
    const double ab = bottom.a / 255.0;
    const double ao = at + ab * (1.0 - at);
    auto mix = [&](std::uint8_t ct, std::uint8_t cb) {
      const double c = (ct * at + cb * ab * (1.0 - at)) / ao;
      return static_cast<std::uint8_t>(std::clamp(std::floor(c + 0.5), 0.0, 255.0));
    };
    d[i] = {mix(top.r, bottom.r), mix(top.g, bottom.g), mix(top.b, bottom.b),
            static_cast<std::uint8_t>(std::clamp(std::floor(ao * 255.0 + 0.5), 0.0, 255.0))};
  }
}

WarpedGarment merge_warped(const WarpedGarment &left, const WarpedGarment &right) {
  if (size_of(left.image) != size_of(right.image))
    throw RenderError("merge: warped halves have different canvas sizes");
  WarpedGarment out;
  out.image = left.image;
  composite_over(out.image, right.image);
  out.mask = alpha_support(out.image);
  out.forward = left.forward;
  out.forward.insert(out.forward.end(), right.forward.begin(), right.forward.end());
  out.backward = left.backward;
  out.backward.insert(out.backward.end(), right.backward.begin(), right.backward.end());
  return out;
}

} // namespace drape
