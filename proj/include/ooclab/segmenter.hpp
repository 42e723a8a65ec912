#pragma once

#include <string>

#include "ooclab/contrast.hpp"
#include "ooclab/phantom.hpp"
#include "ooclab/volume.hpp"

namespace ooclab {

/// The fixed parcellation model: calibrated once at a training contrast and
/// never retrained. Its CSF threshold is what makes accuracy depend on the
/// input contrast.
struct SegmenterModel {
  ContrastTheta theta_train{0.5, 0.5};
  double tau_csf = 0.0;   // set by calibrate()
  double tau_bg = 0.05;
  Eigen::Index min_component = 5;
  double rho_sulcal = 0.8;      // mean canonical-radius cutoff
  double z4_max = 0.35;         // V4 rule: centroid z at or below this
  double midline_halfwidth = 0.06;  // V3 rule: |centroid x - 0.5| within
  Ellipsoid canonical_brain{{0.50, 0.50, 0.52}, {0.38, 0.44, 0.40}};
};

/// Builds the model for a training contrast: tau_csf is the midpoint of the
/// CSF and GM class means there. Throws ImplausibleTrainingContrast.
SegmenterModel calibrate(const ContrastTheta& theta_train);

/// Threshold + connected-component ventricle parcellation:
/// CSF mask (tau_bg < intensity < tau_csf), 6-connected components, drop
/// small components and sulcal shells (mean canonical radius > rho_sulcal),
/// then label each surviving component from its centroid: V4 below z4_max,
/// V3 within the midline band, otherwise left/right lateral by x.
LabelVolume segment(const VoxelVolume& volume, const SegmenterModel& model);

/// Runs an external segmenter over a temp-file protocol: the volume is
/// written as NRRD to "{in}", the command is executed, and "{out}" is read
/// back as a parcel LabelVolume. Exit code 0 means success.
LabelVolume segment_external(const VoxelVolume& volume,
                             const std::string& command_template);
LabelVolume segment_external(const LabelVolume& volume,
                             const std::string& command_template);

}  // namespace ooclab
