#include "ooclab/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "ooclab/errors.hpp"
#include "ooclab/parallel.hpp"

namespace ooclab {
namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt6_opt(const std::optional<double>& v) {
  return v ? fmt6(*v) : "NA";
}

constexpr const char* kLabelNames[] = {"LLV", "RLV", "V3", "V4", "whole"};

std::optional<double> label_dice(const DiceReport& report, int label) {
  return label < 4 ? report.per_parcel[static_cast<std::size_t>(label)]
                   : report.whole;
}

}  // namespace

ContrastTheta sample_native_contrast(SplitMix64& rng) {
  for (;;) {
    ContrastTheta theta;
    theta.theta1 = rng.next_uniform();
    theta.theta2 = rng.next_uniform();
    if (t1w_plausible(theta)) return theta;
  }
}

PairedEvaluation evaluate_ooc(const std::vector<Anatomy>& cohort,
                              const SegmenterModel& model,
                              const ContrastTheta& ooc,
                              const RenderParams& base_params,
                              std::uint64_t base_seed, int jobs,
                              const HarmonizeFn& harmonizer) {
  if (cohort.empty()) throw UsageError("evaluate_ooc: empty cohort");
  if (!t1w_plausible(ooc))
    throw ImplausibleContrast("evaluate_ooc: OOC is not T1-w plausible");

  const HarmonizeFn harmonize_fn =
      harmonizer ? harmonizer
                 : [](const VoxelVolume& v, const ContrastTheta& t) {
                     return harmonize(v, t);
                   };

  PairedEvaluation eval;
  eval.subjects.resize(cohort.size());

  parallel_for(cohort.size(), jobs, [&](std::size_t s) {
    const Anatomy& anatomy = cohort[s];
    try {
      SubjectOutcome outcome;
      outcome.subject_seed = anatomy.subject_seed;

      SplitMix64 rng(substream(base_seed, anatomy.subject_seed));
      outcome.native = sample_native_contrast(rng);

      RenderParams params = base_params;
      params.render_seed = substream(base_seed, anatomy.subject_seed);
      const VoxelVolume image = render(anatomy, outcome.native, params);

      const LabelVolume pred_a = segment(image, model);
      const LabelVolume pred_b = segment(harmonize_fn(image, ooc), model);
      outcome.original = dice_report(pred_a, anatomy.truth);
      outcome.adjusted = dice_report(pred_b, anatomy.truth);
      eval.subjects[s] = std::move(outcome);
    } catch (const std::exception& e) {
      throw Error("subject seed " + std::to_string(anatomy.subject_seed) +
                  ": " + e.what());
    }
  });

  // Reduce in subject-seed order so cohort order cannot leak into summaries.
  std::sort(eval.subjects.begin(), eval.subjects.end(),
            [](const SubjectOutcome& a, const SubjectOutcome& b) {
              return a.subject_seed < b.subject_seed;
            });

  for (int label = 0; label < 5; ++label) {
    LabelSummary summary;
    summary.label = kLabelNames[label];

    std::vector<std::pair<double, double>> pairs;
    std::vector<double> a_values, b_values;
    for (const SubjectOutcome& outcome : eval.subjects) {
      const auto a = label_dice(outcome.original, label);
      const auto b = label_dice(outcome.adjusted, label);
      if (!a || !b) {
        ++summary.n_dropped;
        continue;
      }
      pairs.emplace_back(*a, *b);
      a_values.push_back(*a);
      b_values.push_back(*b);
    }
    summary.n_pairs = static_cast<int>(pairs.size());
    if (!pairs.empty()) {
      const MeanStd a = mean_std(a_values);
      const MeanStd b = mean_std(b_values);
      summary.mean_a = a.mean;
      summary.std_a = a.stddev;
      summary.mean_b = b.mean;
      summary.std_b = b.stddev;
      try {
        summary.wilcoxon = wilcoxon_signed_rank(pairs);
      } catch (const DegenerateSample&) {
        summary.wilcoxon = std::nullopt;  // all differences zero
      }
    }
    eval.labels.push_back(std::move(summary));
  }
  return eval;
}

std::string export_report_csv(const PairedEvaluation& eval) {
  std::ostringstream out;
  out << "subject,label,arm,dice\n";
  for (const SubjectOutcome& outcome : eval.subjects)
    for (int label = 0; label < 5; ++label) {
      out << outcome.subject_seed << "," << kLabelNames[label] << ",A,"
          << fmt6_opt(label_dice(outcome.original, label)) << "\n";
      out << outcome.subject_seed << "," << kLabelNames[label] << ",B,"
          << fmt6_opt(label_dice(outcome.adjusted, label)) << "\n";
    }
  return std::move(out).str();
}

std::string export_summary_csv(const PairedEvaluation& eval) {
  std::ostringstream out;
  out << "label,mean_a,std_a,mean_b,std_b,w_plus,p_two_sided,method,"
         "n_effective\n";
  for (const LabelSummary& s : eval.labels) {
    out << s.label << "," << fmt6_opt(s.mean_a) << "," << fmt6_opt(s.std_a)
        << "," << fmt6_opt(s.mean_b) << "," << fmt6_opt(s.std_b) << ",";
    if (s.wilcoxon) {
      out << fmt6(s.wilcoxon->w_plus) << "," << fmt6(s.wilcoxon->p_two_sided)
          << "," << to_string(s.wilcoxon->method) << ","
          << s.wilcoxon->n_effective;
    } else {
      out << "NA,NA,degenerate,0";
    }
    out << "\n";
  }
  return std::move(out).str();
}

}  // namespace ooclab
