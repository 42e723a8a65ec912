#include "ooclab/segmenter.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>

#include "ooclab/errors.hpp"
#include "ooclab/nrrd.hpp"

namespace ooclab {

SegmenterModel calibrate(const ContrastTheta& theta_train) {
  if (!t1w_plausible(theta_train))
    throw ImplausibleTrainingContrast(
        "training contrast is not T1-w plausible");
  SegmenterModel model;
  model.theta_train = theta_train;
  const ClassMeans mu = class_means(theta_train);
  model.tau_csf = 0.5 * (mu.csf + mu.gm);
  return model;
}

LabelVolume segment(const VoxelVolume& volume, const SegmenterModel& model) {
  LabelVolume csf_mask(volume.dims(), volume.spacing());
  for (Eigen::Index i = 0; i < volume.size(); ++i) {
    const float v = volume.data()[i];
    csf_mask.data()[i] = (v > model.tau_bg && v < model.tau_csf) ? 1 : 0;
  }

  LabelVolume out(volume.dims(), volume.spacing());
  for (const Component& comp : connected_components(csf_mask)) {
    if (comp.size() < model.min_component) continue;

    double radius_sum = 0.0;
    for (Eigen::Index i : comp.voxels)
      radius_sum +=
          model.canonical_brain.radius(csf_mask.normalized_coords(i));
    const double mean_radius = radius_sum / static_cast<double>(comp.size());
    if (mean_radius > model.rho_sulcal) continue;  // sulcal CSF shell

    // First matching rule wins; exact boundary values take the earlier rule.
    std::uint8_t code;
    if (comp.centroid.z() <= model.z4_max)
      code = parcel::kV4;
    else if (std::abs(comp.centroid.x() - 0.5) <= model.midline_halfwidth)
      code = parcel::kV3;
    else if (comp.centroid.x() <= 0.5)
      code = parcel::kLlv;
    else
      code = parcel::kRlv;

    for (Eigen::Index i : comp.voxels) out.data()[i] = code;
  }
  return out;
}

namespace {

std::filesystem::path fresh_scratch_dir() {
  static std::atomic<unsigned> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  for (;;) {
    auto dir = base / ("ooclab-ext-" +
                       std::to_string(static_cast<unsigned long>(::getpid())) +
                       "-" + std::to_string(counter.fetch_add(1)));
    std::error_code ec;
    if (std::filesystem::create_directory(dir, ec)) return dir;
    if (ec) throw IoError("cannot create scratch dir " + dir.string());
  }
}

void replace_all(std::string& text, const std::string& what,
                 const std::string& with) {
  for (std::size_t pos = text.find(what); pos != std::string::npos;
       pos = text.find(what, pos + with.size()))
    text.replace(pos, what.size(), with);
}

template <typename Scalar>
LabelVolume segment_external_impl(const Volume<Scalar>& volume,
                                  const std::string& command_template) {
  if (command_template.find("{in}") == std::string::npos ||
      command_template.find("{out}") == std::string::npos)
    throw UsageError(
        "external command template must contain {in} and {out}");

  const std::filesystem::path dir = fresh_scratch_dir();
  struct Cleanup {
    std::filesystem::path dir;
    ~Cleanup() {
      std::error_code ec;
      std::filesystem::remove_all(dir, ec);
    }
  } cleanup{dir};

  const auto in_path = dir / "in.nrrd";
  const auto out_path = dir / "out.nrrd";
  write_volume_file(in_path, volume);

  std::string command = command_template;
  replace_all(command, "{in}", in_path.string());
  replace_all(command, "{out}", out_path.string());

  const int rc = std::system(command.c_str());
  if (rc != 0)
    throw ExternalFailure("external segmenter failed (status " +
                          std::to_string(rc) + "): " + command);

  LabelVolume labels = read_label_volume_file(out_path);
  if (!labels.same_dims(volume))
    throw ShapeMismatch("external segmenter changed the volume dims");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (!parcel::valid(labels.data()[i]))
      throw LabelRangeError("external segmenter emitted label code " +
                            std::to_string(labels.data()[i]));
  return labels;
}

}  // namespace

LabelVolume segment_external(const VoxelVolume& volume,
                             const std::string& command_template) {
  return segment_external_impl(volume, command_template);
}

LabelVolume segment_external(const LabelVolume& volume,
                             const std::string& command_template) {
  return segment_external_impl(volume, command_template);
}

}  // namespace ooclab
