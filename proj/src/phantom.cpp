#include "ooclab/phantom.hpp"

#include <string>

#include "ooclab/errors.hpp"
#include "ooclab/rng.hpp"

namespace ooclab {
namespace {

double uniform_in(SplitMix64& rng, double bound) {
  return -bound + 2.0 * bound * rng.next_uniform();
}

Ellipsoid jitter_one(SplitMix64& rng, const Ellipsoid& e,
                     const PhantomParams& p) {
  Ellipsoid out = e;
  for (int k = 0; k < 3; ++k)
    out.semi_axes[k] = e.semi_axes[k] * (1.0 + uniform_in(rng, p.jitter_axes));
  for (int k = 0; k < 3; ++k)
    out.center[k] = e.center[k] + uniform_in(rng, p.jitter_center);
  return out;
}

}  // namespace

PhantomGeometry jitter_geometry(std::uint64_t subject_seed,
                                const PhantomParams& params) {
  SplitMix64 rng(subject_seed);
  PhantomGeometry g;
  g.brain = jitter_one(rng, params.brain, params);
  g.gm = g.brain.scaled(params.gm_scale);
  g.wm = g.brain.scaled(params.wm_scale);
  g.llv = jitter_one(rng, params.llv, params);
  g.rlv = jitter_one(rng, params.rlv, params);
  g.v3 = jitter_one(rng, params.v3, params);
  g.v4 = jitter_one(rng, params.v4, params);
  return g;
}

Anatomy generate_anatomy(std::uint64_t subject_seed,
                         const PhantomParams& params) {
  if (params.jitter_axes < 0 || params.jitter_center < 0)
    throw std::invalid_argument("jitter bounds must be non-negative");
  if (!(params.jitter_axes < 1.0))
    throw std::invalid_argument("jitter_axes must leave semi-axes positive");

  const PhantomGeometry g = jitter_geometry(subject_seed, params);

  LabelVolume tissue_map(params.dims, params.spacing);
  const struct {
    const Ellipsoid* shape;
    std::uint8_t code;
  } layers[] = {
      {&g.brain, tissue::kCsf}, {&g.gm, tissue::kGm},  {&g.wm, tissue::kWm},
      {&g.llv, tissue::kLlv},   {&g.rlv, tissue::kRlv}, {&g.v3, tissue::kV3},
      {&g.v4, tissue::kV4},
  };

  Eigen::Index i = 0;
  for (int z = 0; z < params.dims.z(); ++z)
    for (int y = 0; y < params.dims.y(); ++y)
      for (int x = 0; x < params.dims.x(); ++x, ++i) {
        const Eigen::Vector3d u = tissue_map.normalized_coords({x, y, z});
        std::uint8_t code = tissue::kBackground;
        for (const auto& layer : layers)
          if (layer.shape->contains(u)) code = layer.code;
        tissue_map.data()[i] = code;
      }

  const struct {
    std::uint8_t code;
    const char* name;
  } parcels[] = {{tissue::kLlv, "LLV"},
                 {tissue::kRlv, "RLV"},
                 {tissue::kV3, "V3"},
                 {tissue::kV4, "V4"}};
  for (const auto& p : parcels)
    if ((tissue_map.data() == p.code).count() == 0)
      throw DegeneratePhantom("empty parcel " + std::string(p.name) +
                              " for subject seed " +
                              std::to_string(subject_seed));

  LabelVolume truth = truth_of(tissue_map);
  return Anatomy{std::move(tissue_map), std::move(truth), subject_seed};
}

LabelVolume truth_of(const LabelVolume& tissue_map) {
  LabelVolume truth(tissue_map.dims(), tissue_map.spacing());
  for (Eigen::Index i = 0; i < tissue_map.size(); ++i) {
    const std::uint8_t code = tissue_map.data()[i];
    truth.data()[i] =
        (code >= tissue::kLlv && code <= tissue::kV4)
            ? static_cast<std::uint8_t>(code - tissue::kLlv + parcel::kLlv)
            : parcel::kBackground;
  }
  return truth;
}

}  // namespace ooclab
