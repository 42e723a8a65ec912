#include "ooclab/metrics.hpp"

#include <cmath>

#include "ooclab/errors.hpp"

namespace ooclab {

std::optional<double> dice(const LabelVolume& pred, const LabelVolume& truth,
                           std::span<const std::uint8_t> code_set) {
  if (!pred.same_dims(truth))
    throw ShapeMismatch("dice: prediction and truth dims differ");

  bool member[256] = {};
  for (std::uint8_t code : code_set) member[code] = true;

  Eigen::Index a = 0, b = 0, both = 0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const bool in_a = member[pred.data()[i]];
    const bool in_b = member[truth.data()[i]];
    a += in_a;
    b += in_b;
    both += in_a && in_b;
  }
  if (a == 0 && b == 0) return std::nullopt;
  return 2.0 * static_cast<double>(both) / static_cast<double>(a + b);
}

DiceReport dice_report(const LabelVolume& pred, const LabelVolume& truth) {
  DiceReport report;
  for (std::uint8_t code = parcel::kLlv; code <= parcel::kV4; ++code) {
    const std::uint8_t set[] = {code};
    report.per_parcel[code - 1] = dice(pred, truth, set);
  }
  const std::uint8_t whole[] = {parcel::kLlv, parcel::kRlv, parcel::kV3,
                                parcel::kV4};
  report.whole = dice(pred, truth, whole);

  double sum = 0.0;
  int defined = 0;
  for (const auto& d : report.per_parcel)
    if (d) {
      sum += *d;
      ++defined;
    }
  if (defined > 0) report.mean_parcel = sum / defined;

  if (!report.whole && defined == 0)
    throw AllUndefined("dice_report: no ventricle voxels in either volume");
  return report;
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) throw EmptyInput("mean_std: no values");
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());

  MeanStd result{mean, std::nullopt};
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    result.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return result;
}

}  // namespace ooclab
