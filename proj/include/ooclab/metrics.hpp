#pragma once

#include <array>
#include <optional>
#include <span>

#include "ooclab/volume.hpp"

namespace ooclab {

/// Per-parcel and whole-ventricle Dice for one prediction/truth pair.
/// An entry is empty when both volumes select no voxel for it.
struct DiceReport {
  std::array<std::optional<double>, 4> per_parcel;  // codes 1..4
  std::optional<double> whole;                      // union of codes 1..4
  std::optional<double> mean_parcel;  // unweighted mean of defined entries
};

/// Dice overlap 2|A n B| / (|A| + |B|) between the voxel sets selected by
/// code_set in pred and truth. Empty optional iff both sets are empty.
std::optional<double> dice(const LabelVolume& pred, const LabelVolume& truth,
                           std::span<const std::uint8_t> code_set);

/// Dice for each parcel code 1..4 plus the whole-ventricle union. Throws
/// AllUndefined when neither volume contains any ventricle voxel.
DiceReport dice_report(const LabelVolume& pred, const LabelVolume& truth);

struct MeanStd {
  double mean = 0.0;
  std::optional<double> stddev;  // sample std (n-1); empty for n < 2
};

/// Mean and sample standard deviation. Throws EmptyInput for no values.
MeanStd mean_std(std::span<const double> values);

}  // namespace ooclab
