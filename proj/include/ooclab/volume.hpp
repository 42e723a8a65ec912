#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ooclab {

/// Dense 3D scalar grid. Voxels are stored x-fastest
/// (index = x + nx*(y + ny*z)); spacing is in mm. All pipeline operations
/// treat volumes as immutable values.
template <typename Scalar>
class Volume {
 public:
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Volume(const Eigen::Vector3i& dims, const Eigen::Vector3d& spacing)
      : dims_(dims), spacing_(spacing) {
    if ((dims_.array() < 1).any())
      throw std::invalid_argument("volume dims must be positive");
    if (!(spacing_.array() > 0.0).all())
      throw std::invalid_argument("volume spacing must be positive");
    data_ = Array::Zero(static_cast<Eigen::Index>(dims_.x()) * dims_.y() *
                        dims_.z());
  }

  const Eigen::Vector3i& dims() const { return dims_; }
  const Eigen::Vector3d& spacing() const { return spacing_; }
  Eigen::Index size() const { return data_.size(); }

  Array& data() { return data_; }
  const Array& data() const { return data_; }

  Eigen::Index linear_index(int x, int y, int z) const {
    return static_cast<Eigen::Index>(x) +
           static_cast<Eigen::Index>(dims_.x()) *
               (static_cast<Eigen::Index>(y) +
                static_cast<Eigen::Index>(dims_.y()) * z);
  }

  Eigen::Vector3i coords_of(Eigen::Index i) const {
    const Eigen::Index nx = dims_.x(), ny = dims_.y();
    return {static_cast<int>(i % nx), static_cast<int>((i / nx) % ny),
            static_cast<int>(i / (nx * ny))};
  }

  Scalar operator()(int x, int y, int z) const {
    return data_[linear_index(x, y, z)];
  }
  Scalar& operator()(int x, int y, int z) {
    return data_[linear_index(x, y, z)];
  }

  /// Voxel position in normalized grid coordinates, x/(nx-1) per axis.
  /// Singleton axes map to 0.5.
  Eigen::Vector3d normalized_coords(const Eigen::Vector3i& c) const {
    Eigen::Vector3d u;
    for (int k = 0; k < 3; ++k)
      u[k] = dims_[k] > 1 ? static_cast<double>(c[k]) / (dims_[k] - 1) : 0.5;
    return u;
  }
  Eigen::Vector3d normalized_coords(Eigen::Index i) const {
    return normalized_coords(coords_of(i));
  }

  template <typename OtherScalar>
  bool same_dims(const Volume<OtherScalar>& other) const {
    return dims_ == other.dims();
  }

  friend bool operator==(const Volume& a, const Volume& b) {
    return a.dims_ == b.dims_ && a.spacing_ == b.spacing_ &&
           (a.data_ == b.data_).all();
  }

 private:
  Eigen::Vector3i dims_;
  Eigen::Vector3d spacing_;
  Array data_;
};

using VoxelVolume = Volume<float>;
using LabelVolume = Volume<std::uint8_t>;

/// Ventricle parcel codes shared by truth and predictions.
namespace parcel {
inline constexpr std::uint8_t kBackground = 0;
inline constexpr std::uint8_t kLlv = 1;  // left lateral ventricle
inline constexpr std::uint8_t kRlv = 2;  // right lateral ventricle
inline constexpr std::uint8_t kV3 = 3;   // third ventricle
inline constexpr std::uint8_t kV4 = 4;   // fourth ventricle
inline constexpr std::uint8_t kMaxCode = 4;

inline constexpr bool valid(std::uint8_t code) { return code <= kMaxCode; }
}  // namespace parcel

/// One 6-connected foreground component of a binary mask.
struct Component {
  std::vector<Eigen::Index> voxels;  // ascending linear indices
  Eigen::Vector3d centroid{0.5, 0.5, 0.5};  // normalized grid coordinates

  Eigen::Index size() const {
    return static_cast<Eigen::Index>(voxels.size());
  }
};

/// 6-connected components of a binary mask (nonzero = foreground).
/// Components are returned in ascending order of their minimum voxel index.
std::vector<Component> connected_components(const LabelVolume& mask);

}  // namespace ooclab
