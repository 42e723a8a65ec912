#include "ooclab/contrast.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "ooclab/errors.hpp"
#include "ooclab/rng.hpp"

namespace ooclab {

ClassMeans class_means(const ContrastTheta& theta) {
  return {0.10 + 0.10 * theta.theta2, 0.30 + 0.40 * theta.theta1,
          0.50 + 0.40 * theta.theta2};
}

bool t1w_plausible(const ContrastTheta& theta) {
  constexpr double kMargin = 0.08;
  constexpr double kEps = 1e-9;
  const ClassMeans mu = class_means(theta);
  return mu.wm - mu.gm >= kMargin - kEps && mu.gm - mu.csf >= kMargin - kEps;
}

void gaussian_blur(VoxelVolume& volume, double fwhm_vox) {
  if (fwhm_vox <= 0.0) return;
  const double sigma = fwhm_vox / 2.3548;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));

  std::vector<double> weights(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double w = std::exp(-0.5 * (t * t) / (sigma * sigma));
    weights[static_cast<std::size_t>(t + radius)] = w;
    sum += w;
  }
  for (double& w : weights) w /= sum;

  const Eigen::Vector3i d = volume.dims();
  VoxelVolume::Array tmp(volume.size());

  // One pass per axis; out-of-range taps clamp to the edge voxel.
  for (int axis = 0; axis < 3; ++axis) {
    const auto& src = volume.data();
    Eigen::Index i = 0;
    for (int z = 0; z < d.z(); ++z)
      for (int y = 0; y < d.y(); ++y)
        for (int x = 0; x < d.x(); ++x, ++i) {
          int c[3] = {x, y, z};
          double acc = 0.0;
          for (int t = -radius; t <= radius; ++t) {
            int cc[3] = {c[0], c[1], c[2]};
            cc[axis] = std::clamp(c[axis] + t, 0, d[axis] - 1);
            acc += weights[static_cast<std::size_t>(t + radius)] *
                   src[volume.linear_index(cc[0], cc[1], cc[2])];
          }
          tmp[i] = static_cast<float>(acc);
        }
    volume.data().swap(tmp);
  }
}

VoxelVolume render(const Anatomy& anatomy, const ContrastTheta& theta,
                   const RenderParams& params) {
  const ClassMeans mu = class_means(theta);

  std::array<float, 256> lut{};
  lut[tissue::kCsf] = static_cast<float>(mu.csf);
  lut[tissue::kGm] = static_cast<float>(mu.gm);
  lut[tissue::kWm] = static_cast<float>(mu.wm);
  for (std::uint8_t v = tissue::kLlv; v <= tissue::kV4; ++v)
    lut[v] = static_cast<float>(mu.csf);  // ventricles are CSF-filled

  VoxelVolume img(anatomy.tissue.dims(), anatomy.tissue.spacing());
  for (Eigen::Index i = 0; i < img.size(); ++i)
    img.data()[i] = lut[anatomy.tissue.data()[i]];

  gaussian_blur(img, params.blur_fwhm_vox);

  if (params.noise_sigma > 0.0) {
    SplitMix64 rng(substream(params.render_seed, 1));
    for (Eigen::Index i = 0; i < img.size(); ++i)
      img.data()[i] = static_cast<float>(img.data()[i] +
                                         params.noise_sigma *
                                             rng.next_normal());
  }

  img.data() = img.data().max(0.0f).min(1.5f);
  return img;
}

namespace {

constexpr float kBrainMaskThreshold = 0.05f;
constexpr int kClusterCount = 3;
constexpr int kMaxLloydIterations = 25;
constexpr Eigen::Index kMinForeground = 100;

double nearest_rank(const std::vector<float>& sorted, double p) {
  const auto n = static_cast<double>(sorted.size());
  auto k = static_cast<std::size_t>(std::ceil(p * n));
  if (k < 1) k = 1;
  return sorted[k - 1];
}

}  // namespace

ClassMeans estimate_class_means(const VoxelVolume& volume) {
  std::vector<float> values;
  values.reserve(static_cast<std::size_t>(volume.size()) / 4);
  for (Eigen::Index i = 0; i < volume.size(); ++i)
    if (volume.data()[i] > kBrainMaskThreshold)
      values.push_back(volume.data()[i]);

  if (static_cast<Eigen::Index>(values.size()) < kMinForeground)
    throw InsufficientForeground(
        "brain mask has " + std::to_string(values.size()) +
        " voxels, need at least " + std::to_string(kMinForeground));

  std::vector<float> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double centers[kClusterCount] = {nearest_rank(sorted, 0.10),
                                   nearest_rank(sorted, 0.50),
                                   nearest_rank(sorted, 0.90)};

  std::vector<std::uint8_t> assign(values.size(), 255);
  std::vector<std::uint8_t> prev;
  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      int best = 0;
      double best_dist = std::abs(values[i] - centers[0]);
      for (int k = 1; k < kClusterCount; ++k) {
        const double dist = std::abs(values[i] - centers[k]);
        // Ties go to the cluster with the lower mean.
        if (dist < best_dist ||
            (dist == best_dist && centers[k] < centers[best])) {
          best = k;
          best_dist = dist;
        }
      }
      assign[i] = static_cast<std::uint8_t>(best);
    }
    if (assign == prev) break;

    double sums[kClusterCount] = {0, 0, 0};
    Eigen::Index counts[kClusterCount] = {0, 0, 0};
    for (std::size_t i = 0; i < values.size(); ++i) {
      sums[assign[i]] += values[i];
      ++counts[assign[i]];
    }
    for (int k = 0; k < kClusterCount; ++k)
      if (counts[k] > 0) centers[k] = sums[k] / static_cast<double>(counts[k]);
    prev = assign;
  }

  Eigen::Index counts[kClusterCount] = {0, 0, 0};
  for (std::uint8_t a : assign) ++counts[a];
  for (Eigen::Index c : counts)
    if (c == 0) throw DegenerateClusters("empty intensity cluster");

  std::sort(std::begin(centers), std::end(centers));
  if (!(centers[0] < centers[1] && centers[1] < centers[2]))
    throw DegenerateClusters("cluster means are not strictly ascending");
  return {centers[0], centers[1], centers[2]};
}

PiecewiseLinearMap PiecewiseLinearMap::through_class_means(
    const ClassMeans& src, const ClassMeans& dst) {
  PiecewiseLinearMap map;
  map.x_[0] = 0.0;
  map.x_[1] = src.csf;
  map.x_[2] = src.gm;
  map.x_[3] = src.wm;
  map.y_[0] = 0.0;
  map.y_[1] = dst.csf;
  map.y_[2] = dst.gm;
  map.y_[3] = dst.wm;
  for (int k = 0; k < 3; ++k)
    if (!(map.x_[k] < map.x_[k + 1]) || !(map.y_[k] < map.y_[k + 1]))
      throw NonMonotoneMap("control points are not strictly increasing");
  return map;
}

double PiecewiseLinearMap::operator()(double v) const {
  int seg = 2;
  if (v < x_[1])
    seg = 0;
  else if (v < x_[2])
    seg = 1;
  // Values above x_[3] extend the last segment.
  const double slope = (y_[seg + 1] - y_[seg]) / (x_[seg + 1] - x_[seg]);
  return y_[seg] + (v - x_[seg]) * slope;
}

VoxelVolume harmonize(const VoxelVolume& volume,
                      const ContrastTheta& theta_target) {
  if (!t1w_plausible(theta_target))
    throw ImplausibleContrast("harmonization target is not T1-w plausible");

  const ClassMeans src = estimate_class_means(volume);
  const ClassMeans dst = class_means(theta_target);
  const PiecewiseLinearMap map =
      PiecewiseLinearMap::through_class_means(src, dst);

  VoxelVolume out(volume.dims(), volume.spacing());
  for (Eigen::Index i = 0; i < volume.size(); ++i)
    out.data()[i] =
        static_cast<float>(std::max(0.0, map(volume.data()[i])));
  return out;
}

}  // namespace ooclab
