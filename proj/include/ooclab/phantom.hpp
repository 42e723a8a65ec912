#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "ooclab/volume.hpp"

namespace ooclab {

/// Axis-aligned ellipsoid in normalized volume coordinates.
struct Ellipsoid {
  Eigen::Vector3d center;
  Eigen::Vector3d semi_axes;

  /// Canonical radius of a point: 0 at the center, 1 on the surface.
  double radius(const Eigen::Vector3d& u) const {
    return ((u - center).array() / semi_axes.array()).matrix().norm();
  }

  bool contains(const Eigen::Vector3d& u) const {
    return ((u - center).array() / semi_axes.array()).matrix().squaredNorm() <=
           1.0;
  }

  Ellipsoid scaled(double factor) const {
    return {center, semi_axes * factor};
  }
};

/// Tissue codes of the synthetic subjects. Ventricles carry their own codes
/// so the parcel truth can be derived from the tissue map alone.
namespace tissue {
inline constexpr std::uint8_t kBackground = 0;
inline constexpr std::uint8_t kCsf = 1;  // sulcal CSF
inline constexpr std::uint8_t kGm = 2;
inline constexpr std::uint8_t kWm = 3;
inline constexpr std::uint8_t kLlv = 11;
inline constexpr std::uint8_t kRlv = 12;
inline constexpr std::uint8_t kV3 = 13;
inline constexpr std::uint8_t kV4 = 14;

inline constexpr bool valid(std::uint8_t code) {
  return code <= kWm || (code >= kLlv && code <= kV4);
}
}  // namespace tissue

struct PhantomParams {
  Eigen::Vector3i dims{64, 64, 64};
  Eigen::Vector3d spacing{1.0, 1.0, 1.0};

  // Canonical geometry in normalized coordinates.
  Ellipsoid brain{{0.50, 0.50, 0.52}, {0.38, 0.44, 0.40}};
  Ellipsoid llv{{0.35, 0.48, 0.55}, {0.055, 0.16, 0.07}};
  Ellipsoid rlv{{0.65, 0.48, 0.55}, {0.055, 0.16, 0.07}};
  Ellipsoid v3{{0.50, 0.45, 0.44}, {0.02, 0.09, 0.06}};
  Ellipsoid v4{{0.50, 0.38, 0.24}, {0.035, 0.05, 0.05}};
  double gm_scale = 0.94;
  double wm_scale = 0.78;

  // Per-subject jitter bounds: relative on semi-axes, additive on centers.
  double jitter_axes = 0.08;
  double jitter_center = 0.02;
};

/// Jittered per-subject geometry. GM and WM are scaled copies of the
/// jittered brain ellipsoid and draw no jitter of their own.
struct PhantomGeometry {
  Ellipsoid brain, gm, wm, llv, rlv, v3, v4;
};

/// One synthetic subject: tissue map, derived parcel truth, and the seed
/// that regenerates both.
struct Anatomy {
  LabelVolume tissue;
  LabelVolume truth;
  std::uint64_t subject_seed = 0;
};

/// Deterministic jitter of the canonical geometry. Draw order is fixed:
/// for brain, LLV, RLV, V3, V4 in turn, three semi-axis factors then three
/// center offsets.
PhantomGeometry jitter_geometry(std::uint64_t subject_seed,
                                const PhantomParams& params);

/// Paints the subject onto an all-background grid in increasing precedence:
/// sulcal CSF (brain), GM, WM, then the four ventricles. Throws
/// DegeneratePhantom if any ventricle parcel comes out empty.
Anatomy generate_anatomy(std::uint64_t subject_seed,
                         const PhantomParams& params = {});

/// Parcel truth from a tissue map: ventricle codes 11..14 become 1..4,
/// everything else background.
LabelVolume truth_of(const LabelVolume& tissue);

}  // namespace ooclab
