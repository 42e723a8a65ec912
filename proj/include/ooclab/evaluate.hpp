#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ooclab/contrast.hpp"
#include "ooclab/metrics.hpp"
#include "ooclab/phantom.hpp"
#include "ooclab/rng.hpp"
#include "ooclab/segmenter.hpp"
#include "ooclab/stats.hpp"

namespace ooclab {

/// Rejection-samples a contrast uniformly over [0,1]^2 until it is T1-w
/// plausible. Each attempt consumes two uniforms, theta1 first.
ContrastTheta sample_native_contrast(SplitMix64& rng);

/// Per-subject outcome of the paired protocol: arm A segments the image at
/// its native contrast, arm B segments the same image harmonized to the OOC.
struct SubjectOutcome {
  std::uint64_t subject_seed = 0;
  ContrastTheta native;
  DiceReport original;  // arm A
  DiceReport adjusted;  // arm B
};

/// Paired summary of one label over the cohort.
struct LabelSummary {
  std::string label;
  int n_pairs = 0;    // subjects with a defined Dice in both arms
  int n_dropped = 0;  // subjects dropped because either arm was undefined
  std::optional<double> mean_a, std_a;
  std::optional<double> mean_b, std_b;
  std::optional<WilcoxonResult> wilcoxon;  // empty when degenerate
};

struct PairedEvaluation {
  std::vector<SubjectOutcome> subjects;  // ascending subject seed
  std::vector<LabelSummary> labels;      // LLV, RLV, V3, V4, whole
};

using HarmonizeFn =
    std::function<VoxelVolume(const VoxelVolume&, const ContrastTheta&)>;

/// The held-out protocol: each subject is rendered at a hidden native
/// contrast (seeded by substream(base_seed, subject_seed)), segmented as-is
/// and after harmonization to the OOC, and compared per label with a paired
/// Wilcoxon test. Keying every random stream by subject seed makes the
/// result independent of cohort order and worker count.
PairedEvaluation evaluate_ooc(const std::vector<Anatomy>& cohort,
                              const SegmenterModel& model,
                              const ContrastTheta& ooc,
                              const RenderParams& base_params,
                              std::uint64_t base_seed, int jobs = 1,
                              const HarmonizeFn& harmonizer = {});

/// One row per (subject, label, arm): byte-exact CSV.
std::string export_report_csv(const PairedEvaluation& eval);

/// One row per label with both arms' mean/std and the Wilcoxon result.
std::string export_summary_csv(const PairedEvaluation& eval);

}  // namespace ooclab
