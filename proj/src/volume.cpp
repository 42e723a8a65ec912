#include "ooclab/volume.hpp"

#include <algorithm>

namespace ooclab {

std::vector<Component> connected_components(const LabelVolume& mask) {
  const Eigen::Vector3i d = mask.dims();
  const Eigen::Index n = mask.size();
  const Eigen::Index sx = 1;
  const Eigen::Index sy = d.x();
  const Eigen::Index sz = static_cast<Eigen::Index>(d.x()) * d.y();

  std::vector<char> visited(static_cast<std::size_t>(n), 0);
  std::vector<Component> components;
  std::vector<Eigen::Index> queue;

  // Scanning in linear order guarantees each component is seeded at its
  // minimum voxel index, which fixes the component ordering.
  for (Eigen::Index seed = 0; seed < n; ++seed) {
    if (mask.data()[seed] == 0 || visited[seed]) continue;

    queue.clear();
    queue.push_back(seed);
    visited[seed] = 1;
    std::size_t head = 0;
    while (head < queue.size()) {
      const Eigen::Index i = queue[head++];
      const Eigen::Vector3i c = mask.coords_of(i);
      const auto try_push = [&](Eigen::Index j) {
        if (!visited[j] && mask.data()[j] != 0) {
          visited[j] = 1;
          queue.push_back(j);
        }
      };
      if (c.x() > 0) try_push(i - sx);
      if (c.x() + 1 < d.x()) try_push(i + sx);
      if (c.y() > 0) try_push(i - sy);
      if (c.y() + 1 < d.y()) try_push(i + sy);
      if (c.z() > 0) try_push(i - sz);
      if (c.z() + 1 < d.z()) try_push(i + sz);
    }

    Component comp;
    comp.voxels = queue;
    std::sort(comp.voxels.begin(), comp.voxels.end());
    Eigen::Vector3d sum = Eigen::Vector3d::Zero();
    for (Eigen::Index i : comp.voxels) sum += mask.normalized_coords(i);
    comp.centroid = sum / static_cast<double>(comp.voxels.size());
    components.push_back(std::move(comp));
  }
  return components;
}

}  // namespace ooclab
