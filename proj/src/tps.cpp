#include "drape/tps.hpp"

#include <Eigen/LU>
#include <fmt/format.h>

#include "drape/error.hpp"

namespace drape {

Vec2 TpsWarp::apply(Vec2 p) const {
  double x = affine(0, 0) + affine(0, 1) * p.x + affine(0, 2) * p.y;
  double y = affine(1, 0) + affine(1, 1) * p.x + affine(1, 2) * p.y;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    const double dx = p.x - sites[i].x;
    const double dy = p.y - sites[i].y;
    const double u = tps_kernel_sq(dx * dx + dy * dy);
    x += weights(static_cast<Eigen::Index>(i), 0) * u;
    y += weights(static_cast<Eigen::Index>(i), 1) * u;
  }
  return {x, y};
}

namespace {

void check_sites(std::span<const Vec2> src) {
  const std::size_t n = src.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(src[i].x) || !std::isfinite(src[i].y))
      throw FitError(fmt::format("TPS fit: source point {} is not finite", i));
    for (std::size_t j = i + 1; j < n; ++j)
      if (distance(src[i], src[j]) < 1e-12)
        throw FitError(fmt::format("TPS fit: rank deficient, source points {} and {} coincide", i, j));
  }

  // Collinearity: the centered scatter matrix must have two non-negligible eigenvalues.
  Vec2 mean{};
  for (Vec2 p : src)
    mean += p;
  mean = (1.0 / static_cast<double>(n)) * mean;
  double sxx = 0, syy = 0, sxy = 0;
  for (Vec2 p : src) {
    const Vec2 d = p - mean;
    sxx += d.x * d.x;
    syy += d.y * d.y;
    sxy += d.x * d.y;
  }
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
  const double big = tr / 2.0 + disc;
  const double small = det / std::max(big, 1e-300);
  if (!(small > 1e-14 * big))
    throw FitError("TPS fit: rank deficient, source points are collinear");
}

} // namespace

TpsWarp fit_tps(std::span<const Vec2> src, std::span<const Vec2> dst, double lambda) {
  if (src.size() != dst.size())
    throw FitError(fmt::format("TPS fit: {} source points but {} targets", src.size(), dst.size()));
  if (src.size() < 3)
    throw FitError("TPS fit: need at least three correspondences");
  if (!(lambda >= 0.0))
    throw FitError("TPS fit: lambda must be non-negative");
  check_sites(src);

  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::MatrixXd system = Eigen::MatrixXd::Zero(n + 3, n + 3);
  Eigen::MatrixX2d rhs = Eigen::MatrixX2d::Zero(n + 3, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec2 pi = src[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec2 d = pi - src[static_cast<std::size_t>(j)];
      const double u = tps_kernel_sq(dot(d, d));
      system(i, j) = u;
      system(j, i) = u;
    }
    system(i, i) = lambda;
    system(i, n) = 1.0;
    system(i, n + 1) = pi.x;
    system(i, n + 2) = pi.y;
    system(n, i) = 1.0;
    system(n + 1, i) = pi.x;
    system(n + 2, i) = pi.y;
    rhs(i, 0) = dst[static_cast<std::size_t>(i)].x;
    rhs(i, 1) = dst[static_cast<std::size_t>(i)].y;
  }

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible())
    throw FitError("TPS fit: rank deficient system");
  const Eigen::MatrixX2d sol = lu.solve(rhs);
  if (!sol.allFinite())
    throw FitError("TPS fit: solution is not finite");

  TpsWarp w;
  w.sites.assign(src.begin(), src.end());
  w.lambda = lambda;
  w.weights = sol.topRows(n);
  w.affine = sol.bottomRows(3).transpose();
  return w;
}

std::vector<Vec2> transform_points(const TpsWarp &warp, std::span<const Vec2> points) {
  std::vector<Vec2> out;
  out.reserve(points.size());
  for (Vec2 p : points)
    out.push_back(warp.apply(p));
  return out;
}

} // namespace drape
