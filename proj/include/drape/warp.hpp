#pragma once

#include <utility>
#include <vector>

#include "drape/asset.hpp"
#include "drape/raster.hpp"
#include "drape/schema.hpp"
#include "drape/tps.hpp"

namespace drape {

/// A garment resampled onto the person canvas. `mask` is always the
/// nonzero-alpha support of `image`. A merged split garment carries one
/// forward/backward pair per half.
struct WarpedGarment {
  Image image;
  Mask mask;
  std::vector<TpsWarp> forward;  // garment-image normalized -> canvas normalized
  std::vector<TpsWarp> backward; // canvas normalized -> garment-image normalized
};

struct WarpOptions {
  double lambda = 1e-3;
  /// Worker threads for rasterization; 0 picks the hardware concurrency.
  /// The output does not depend on this value.
  int threads = 0;
};

/// Fits the backward warp over points present in both sets and resamples
/// the garment bilinearly (mask-restricted) at every canvas pixel.
/// Throws RenderError with fewer than three shared points, FitError on a
/// degenerate fit.
WarpedGarment warp_image(const GarmentAsset &asset, const ControlPointSet &on_body, CanvasSize canvas,
                         const WarpOptions &options = {});

/// Cuts outerwear along its split polyline. Masks partition exactly; points
/// go to the half matching their schema side, with `shared_on_split` center
/// points kept in both.
std::pair<GarmentAsset, GarmentAsset> split_garment(const GarmentAsset &asset, const ControlPointSchema &schema);

/// Alpha-over composite of `right` over `left`; the mask is their union.
WarpedGarment merge_warped(const WarpedGarment &left, const WarpedGarment &right);

/// Straight-alpha "over": src composited on top of dst, in place.
void composite_over(Image &dst, const Image &src);

} // namespace drape
