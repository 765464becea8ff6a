#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "drape/geometry.hpp"

namespace drape {

/// Thin-plate-spline kernel U(r) = r² log r², written in terms of r².
inline double tps_kernel_sq(double r2) { return r2 > 0.0 ? r2 * std::log(r2) : 0.0; }

/// A fitted 2D thin-plate spline:
///   f(p) = affine · [1, x, y]ᵀ + Σ_i weights.row(i) · U(|p - sites[i]|)
/// The radial weights satisfy Σw = Σw·x = Σw·y = 0.
struct TpsWarp {
  std::vector<Vec2> sites;
  Eigen::Matrix<double, 2, 3> affine = (Eigen::Matrix<double, 2, 3>() << 0, 1, 0, 0, 0, 1).finished();
  Eigen::MatrixX2d weights;
  double lambda = 0.0;

  std::size_t control_count() const { return sites.size(); }
  Vec2 apply(Vec2 p) const;
};

/// Solves the TPS system [K + λI, P; Pᵀ, 0]·[w; a] = [dst; 0].
/// Throws FitError on mismatched sizes, fewer than three sites, coincident
/// or collinear sources, or a singular system.
TpsWarp fit_tps(std::span<const Vec2> src, std::span<const Vec2> dst, double lambda);

std::vector<Vec2> transform_points(const TpsWarp &warp, std::span<const Vec2> points);

} // namespace drape
