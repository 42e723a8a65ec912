#pragma once

#include <cstdint>

#include "ooclab/phantom.hpp"
#include "ooclab/volume.hpp"

namespace ooclab {

/// Point in the 2D contrast space searched by the pipeline.
struct ContrastTheta {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

/// Mean intensity of the three tissue classes at some contrast.
struct ClassMeans {
  double csf = 0.0;
  double gm = 0.0;
  double wm = 0.0;
};

struct RenderParams {
  double noise_sigma = 0.02;
  double blur_fwhm_vox = 1.2;
  std::uint64_t render_seed = 0;
};

/// Affine contrast decoder: maps a contrast code to tissue class means.
ClassMeans class_means(const ContrastTheta& theta);

/// True iff the contrast shows the canonical T1-w ordering WM > GM > CSF
/// with a margin of 0.08 on both gaps (boundary inclusive, float-robust).
bool t1w_plausible(const ContrastTheta& theta);

/// Renders a subject at the given contrast: class means, separable Gaussian
/// blur (sigma = fwhm/2.3548 voxels, clamp-to-edge), additive Gaussian noise
/// from substream(render_seed, 1), clamp to [0, 1.5].
VoxelVolume render(const Anatomy& anatomy, const ContrastTheta& theta,
                   const RenderParams& params);

/// In-place separable Gaussian blur, kernel radius ceil(3*sigma), weights
/// renormalized to sum 1, clamp-to-edge boundaries. No-op for fwhm <= 0.
void gaussian_blur(VoxelVolume& volume, double fwhm_vox);

/// Recovers class means from intensities alone: k-means (k=3) over the brain
/// mask (> 0.05) with nearest-rank decile initialization and deterministic
/// tie-breaking. Returns means sorted ascending as (csf, gm, wm).
ClassMeans estimate_class_means(const VoxelVolume& volume);

/// Continuous piecewise-linear intensity map through fixed control points,
/// extended above the last point with the final segment's slope.
class PiecewiseLinearMap {
 public:
  /// Map through (0,0), (src.csf,dst.csf), (src.gm,dst.gm), (src.wm,dst.wm).
  /// Throws NonMonotoneMap unless both coordinate sequences are strictly
  /// increasing.
  static PiecewiseLinearMap through_class_means(const ClassMeans& src,
                                                const ClassMeans& dst);

  double operator()(double v) const;

 private:
  PiecewiseLinearMap() = default;
  double x_[4] = {0, 0, 0, 0};
  double y_[4] = {0, 0, 0, 0};
};

/// Remaps a volume's intensities so its estimated class means land on the
/// target contrast's means. Anatomy is untouched; only intensities change.
/// Negative outputs clamp to 0.
VoxelVolume harmonize(const VoxelVolume& volume,
                      const ContrastTheta& theta_target);

}  // namespace ooclab
