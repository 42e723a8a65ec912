// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// criterion fails. Criteria 2 and 5-7 share a single default pipeline run.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ooclab/cohort.hpp"
#include "ooclab/config.hpp"
#include "ooclab/errors.hpp"
#include "ooclab/evaluate.hpp"
#include "ooclab/metrics.hpp"
#include "ooclab/nrrd.hpp"
#include "ooclab/rng.hpp"
#include "ooclab/search.hpp"
#include "ooclab/segmenter.hpp"
#include "ooclab/stats.hpp"

using namespace ooclab;
namespace fs = std::filesystem;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw CheckFailure(what);
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

// ---------------------------------------------------------------------------
// Shared default pipeline run (config defaults, single-threaded).

struct PipelineRun {
  Config config;
  std::vector<Anatomy> tuning;
  std::vector<Anatomy> test;
  SegmenterModel model;
  HeatmapResult heatmap;
  PairedEvaluation evaluation;
  double seconds = 0.0;
};

const PipelineRun& default_pipeline() {
  static const PipelineRun run = [] {
    const auto start = std::chrono::steady_clock::now();
    PipelineRun r;
    r.config.validate();
    const PhantomParams phantom = r.config.phantom_params();
    r.tuning = generate_cohort(
        {r.config.tuning_seed_start, r.config.tuning_subjects}, phantom);
    r.test = generate_cohort(
        {r.config.test_seed_start, r.config.test_subjects}, phantom);
    r.model = calibrate(r.config.theta_train);
    const ContrastGrid grid =
        build_grid(r.config.grid_bounds, r.config.grid_resolution);
    r.heatmap = grid_search(r.tuning, r.model, grid,
                            r.config.render_params(),
                            r.config.grid_base_seed, /*jobs=*/1);
    r.evaluation = evaluate_ooc(r.test, r.model, r.heatmap.ooc,
                                r.config.render_params(),
                                r.config.eval_base_seed, /*jobs=*/1);
    r.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    return r;
  }();
  return run;
}

const LabelSummary& summary_for(const PipelineRun& run,
                                const std::string& label) {
  for (const LabelSummary& s : run.evaluation.labels)
    if (s.label == label) return s;
  throw CheckFailure("no summary for label " + label);
}

// ---------------------------------------------------------------------------
// Criterion 1: grid rejection count.

void criterion_grid_rejection(std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const ContrastGrid grid = build_grid(GridBounds{}, {10, 10});
  int plausible = 0;
  for (const GridCell& cell : grid.cells) plausible += cell.plausible;
  const int rejected = static_cast<int>(grid.cells.size()) - plausible;
  const double secs = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
  require(grid.cells.size() == 100,
          "expected 100 cells, got " + std::to_string(grid.cells.size()));
  require(rejected == 21,
          "expected 21 rejected cells, got " + std::to_string(rejected));
  require(plausible == 79,
          "expected 79 scored cells, got " + std::to_string(plausible));
  require(secs < 1.0, "grid construction took " + fmt(secs) + " s");
  out << "100 cells, 21 rejected, 79 scored in " << fmt(secs) << " s";
}

// ---------------------------------------------------------------------------
// Criterion 2: OOC improvement with significance on the test cohort.

void criterion_ooc_improvement(std::ostream& out) {
  const PipelineRun& run = default_pipeline();
  require(run.seconds < 300.0, "single-threaded pipeline took " +
                                   fmt(run.seconds) + " s (limit 300)");

  const LabelSummary& whole = summary_for(run, "whole");
  require(whole.mean_a && whole.mean_b, "whole-ventricle means undefined");
  require(*whole.mean_b > *whole.mean_a,
          "whole mean Dice did not improve: " + fmt(*whole.mean_a) +
              " -> " + fmt(*whole.mean_b));

  out << "whole Dice " << fmt(*whole.mean_a) << " -> " << fmt(*whole.mean_b);
  for (const std::string label : {"whole", "LLV", "RLV", "V4"}) {
    const LabelSummary& s = summary_for(run, label);
    require(s.wilcoxon.has_value(), label + ": degenerate Wilcoxon");
    require(s.wilcoxon->p_two_sided < 0.01,
            label + ": p = " + fmt(s.wilcoxon->p_two_sided) + " >= 0.01");
    out << ", p(" << label << ") = " << fmt(s.wilcoxon->p_two_sided);
  }
  out << ", pipeline " << fmt(run.seconds) << " s";
}

// ---------------------------------------------------------------------------
// Criterion 3: Wilcoxon exactness against the enumeration oracle.

double oracle_wilcoxon_p(const std::vector<std::pair<double, double>>& pairs) {
  std::vector<double> abs_d;
  std::vector<bool> pos;
  for (const auto& [a, b] : pairs) {
    const double d = b - a;
    if (d == 0.0) continue;
    abs_d.push_back(std::abs(d));
    pos.push_back(d > 0);
  }
  const std::size_t n = abs_d.size();

  // Midranks, recomputed independently of the library.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return abs_d[a] < abs_d[b];
  });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && abs_d[order[j + 1]] == abs_d[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k)
      ranks[order[k]] = 0.5 * static_cast<double>(i + j + 2);
    i = j + 1;
  }

  double w_obs = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (pos[i]) w_obs += ranks[i];

  std::uint64_t le = 0, ge = 0;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (bits & (1ull << i)) w += ranks[i];
    if (w <= w_obs) ++le;
    if (w >= w_obs) ++ge;
  }
  const double p_lo = static_cast<double>(le) / static_cast<double>(total);
  const double p_hi = static_cast<double>(ge) / static_cast<double>(total);
  return std::min(1.0, 2.0 * std::min(p_lo, p_hi));
}

void criterion_wilcoxon_exactness(std::ostream& out) {
  SplitMix64 rng(31415);
  int checked = 0;
  double worst_normal_gap = 0.0;

  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<std::pair<double, double>> pairs;
      bool any_nonzero = false;
      const bool discrete = trial % 2 == 1;  // forces ties and zeros
      for (std::size_t i = 0; i < n; ++i) {
        double d;
        if (discrete)
          d = static_cast<double>(static_cast<long long>(rng.next_u64() % 7)) -
              3.0;
        else
          d = rng.next_uniform() * 2.0 - 1.0;
        any_nonzero |= d != 0.0;
        pairs.emplace_back(0.0, d);
      }
      if (!any_nonzero) continue;

      const WilcoxonResult exact = wilcoxon_signed_rank(pairs);
      const double oracle = oracle_wilcoxon_p(pairs);
      require(std::abs(exact.p_two_sided - oracle) <= 1e-12,
              "n=" + std::to_string(n) + ": exact p " +
                  fmt(exact.p_two_sided) + " vs oracle " + fmt(oracle));
      ++checked;

      if (n == 12) {
        const WilcoxonResult approx =
            wilcoxon_signed_rank(pairs, /*exact_cutoff=*/0);
        const double gap =
            std::abs(approx.p_two_sided - exact.p_two_sided);
        worst_normal_gap = std::max(worst_normal_gap, gap);
        require(gap < 0.015, "normal approximation off by " + fmt(gap));
      }
    }
  }

  std::vector<std::pair<double, double>> five;
  for (int k = 1; k <= 5; ++k) five.emplace_back(0.0, k);
  const WilcoxonResult r = wilcoxon_signed_rank(five);
  require(r.p_two_sided == 0.0625,
          "all-positive n=5 case gave p = " + fmt(r.p_two_sided));

  out << checked << " random inputs matched the enumeration oracle; "
      << "worst normal-approximation gap " << fmt(worst_normal_gap)
      << "; n=5 case p = 0.0625";
}

// ---------------------------------------------------------------------------
// Criterion 4: Dice property suite.

void criterion_dice_properties(std::ostream& out) {
  SplitMix64 rng(27182);
  const Eigen::Vector3i dims{5, 4, 3};
  constexpr std::uint8_t one[] = {1};

  for (int trial = 0; trial < 200; ++trial) {
    LabelVolume a(dims, {1, 1, 1}), b(dims, {1, 1, 1});
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      a.data()[i] = rng.next_u64() % 3 == 0 ? 1 : 0;
      b.data()[i] = rng.next_u64() % 3 == 0 ? 1 : 0;
    }
    const auto ab = dice(a, b, one);
    const auto ba = dice(b, a, one);
    require(ab == ba, "dice is not symmetric");
    if (ab) {
      require(*ab >= 0.0 && *ab <= 1.0, "dice out of range");
      const bool identical = (a.data() == b.data()).all();
      if (identical) require(*ab == 1.0, "identical sets must give 1");
      if (*ab == 1.0) {
        for (Eigen::Index i = 0; i < a.size(); ++i)
          require((a.data()[i] == 1) == (b.data()[i] == 1),
                  "dice 1 with differing sets");
      }
    }
  }

  // Identity, disjoint, both-empty.
  LabelVolume x(dims, {1, 1, 1}), y(dims, {1, 1, 1});
  require(!dice(x, y, one).has_value(), "both-empty must be undefined");
  x(0, 0, 0) = 1;
  y(1, 0, 0) = 1;
  require(*dice(x, y, one) == 0.0, "disjoint must give 0");
  y = x;
  require(*dice(x, y, one) == 1.0, "identity must give 1");

  // Whole-union vs parcel-mean counterexample.
  LabelVolume truth({6, 6, 6}, {1, 1, 1}), pred({6, 6, 6}, {1, 1, 1});
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) truth(i, j, 0) = pred(i, j, 0) = 1;
  truth(0, 0, 5) = 4;
  pred(1, 0, 5) = 4;
  const DiceReport report = dice_report(pred, truth);
  require(report.whole.has_value() && report.mean_parcel.has_value(),
          "counterexample report incomplete");
  require(*report.whole != *report.mean_parcel,
          "whole-union Dice must differ from the parcel mean");

  out << "symmetry, range, identity, disjoint, undefined and "
      << "union-vs-mean counterexample all hold";
}

// ---------------------------------------------------------------------------
// Criterion 5: harmonization fidelity.

void criterion_harmonization_fidelity(std::ostream& out) {
  const PipelineRun& run = default_pipeline();
  const PhantomParams phantom = run.config.phantom_params();
  const RenderParams noiseless{0.0, run.config.blur_fwhm_vox, 0};

  // Noiseless intensity fidelity over 20 random plausible pairs.
  SplitMix64 rng(161803);
  double worst_mad = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const ContrastTheta source = sample_native_contrast(rng);
    const ContrastTheta target = sample_native_contrast(rng);
    const Anatomy anatomy =
        generate_anatomy(200 + static_cast<std::uint64_t>(trial), phantom);

    const VoxelVolume direct = render(anatomy, target, noiseless);
    const VoxelVolume mapped =
        harmonize(render(anatomy, source, noiseless), target);

    double sum = 0.0;
    Eigen::Index n = 0;
    for (Eigen::Index i = 0; i < direct.size(); ++i)
      if (direct.data()[i] > 0.05f) {
        sum += std::abs(direct.data()[i] - mapped.data()[i]);
        ++n;
      }
    const double mad = sum / static_cast<double>(n);
    worst_mad = std::max(worst_mad, mad);
    require(mad < 0.02, "mean absolute difference " + fmt(mad) +
                            " for pair " + std::to_string(trial));
  }

  // With default noise: segment(harmonize(v, ooc)) tracks segmenting a
  // direct render at the OOC, averaged over the tuning cohort.
  const ContrastTheta ooc = run.heatmap.ooc;
  double sum_harmonized = 0.0, sum_direct = 0.0;
  SplitMix64 theta_rng(271828);
  for (std::size_t s = 0; s < run.tuning.size(); ++s) {
    const Anatomy& anatomy = run.tuning[s];
    const ContrastTheta native = sample_native_contrast(theta_rng);
    RenderParams params = run.config.render_params(
        substream(424242, anatomy.subject_seed));

    const VoxelVolume native_img = render(anatomy, native, params);
    const VoxelVolume direct_img = render(anatomy, ooc, params);

    const auto whole_dice = [&](const VoxelVolume& img) {
      const DiceReport r =
          dice_report(segment(img, run.model), anatomy.truth);
      require(r.whole.has_value(), "whole Dice undefined");
      return *r.whole;
    };
    sum_harmonized += whole_dice(harmonize(native_img, ooc));
    sum_direct += whole_dice(direct_img);
  }
  const double mean_harmonized =
      sum_harmonized / static_cast<double>(run.tuning.size());
  const double mean_direct =
      sum_direct / static_cast<double>(run.tuning.size());
  require(std::abs(mean_harmonized - mean_direct) < 0.05,
          "whole Dice via harmonization " + fmt(mean_harmonized) +
              " vs direct render " + fmt(mean_direct));

  out << "worst noiseless MAD " << fmt(worst_mad)
      << "; noisy whole Dice harmonized " << fmt(mean_harmonized)
      << " vs direct " << fmt(mean_direct);
}

// ---------------------------------------------------------------------------
// Criterion 6: determinism and parallel equivalence through the CLI.

int run_cli(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd " + cwd.string() + " && " + OOCLAB_CLI_PATH +
                          " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion_determinism(std::ostream& out) {
  const fs::path base =
      fs::temp_directory_path() /
      ("ooclab-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);
  struct Cleanup {
    fs::path dir;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(dir, ec);
    }
  } cleanup{base};

  // Small-but-real configuration keeps three CLI pipeline runs quick while
  // still covering every output format.
  const std::string config =
      "phantom_nx = 48\nphantom_ny = 48\nphantom_nz = 48\n"
      "grid_res1 = 6\ngrid_res2 = 6\n"
      "tuning_subjects = 4\ntest_subjects = 8\n";
  {
    std::ofstream cfg(base / "run.cfg");
    cfg << config;
  }

  require(run_cli("cohort generate --config run.cfg --cohort-dir c1", base) ==
              0,
          "cohort generate (run 1) failed");
  require(run_cli("cohort generate --config run.cfg --cohort-dir c2", base) ==
              0,
          "cohort generate (run 2) failed");
  for (const char* name :
       {"tuning/sub-0_tissue.nrrd", "tuning/sub-3_truth.nrrd",
        "test/sub-100_tissue.nrrd", "test/sub-107_truth.nrrd"})
    require(read_file_bytes(base / "c1" / name) ==
                read_file_bytes(base / "c2" / name),
            std::string("cohort file differs across runs: ") + name);

  const auto grid_eval = [&](const std::string& out_dir,
                             const std::string& jobs) {
    require(run_cli("grid-search --config run.cfg --cohort-dir c1 --out-dir " +
                        out_dir + " --jobs " + jobs,
                    base) == 0,
            "grid-search failed in " + out_dir);
    require(run_cli("evaluate --config run.cfg --cohort-dir c1 --out-dir " +
                        out_dir + " --jobs " + jobs,
                    base) == 0,
            "evaluate failed in " + out_dir);
  };
  grid_eval("out1", "1");
  grid_eval("out2", "1");  // repeatability
  grid_eval("out8", "8");  // parallel equivalence

  for (const char* name : {"heatmap.csv", "heatmap.pgm", "ooc.txt",
                           "report.csv", "summary.csv"}) {
    const std::string reference = read_file_bytes(base / "out1" / name);
    require(read_file_bytes(base / "out2" / name) == reference,
            std::string(name) + " differs across repeated runs");
    require(read_file_bytes(base / "out8" / name) == reference,
            std::string(name) + " differs between --jobs 1 and --jobs 8");
  }
  out << "byte-identical cohort, heatmap, OOC and report outputs across "
         "reruns and --jobs 1/8";
}

// ---------------------------------------------------------------------------
// Criterion 7: contrast-sensitivity shape of the heatmap.

void criterion_contrast_sensitivity(std::ostream& out) {
  const PipelineRun& run = default_pipeline();
  const HeatmapResult& heatmap = run.heatmap;
  const double ooc_score = heatmap.cells[heatmap.ooc_index]->mean_dice;

  double worst_gap = 1.0;
  int column_cells = 0;
  for (const GridCell& cell : heatmap.grid.cells) {
    if (cell.i != 0 || !cell.plausible) continue;  // column theta1 = 0.05
    const auto& score = heatmap.cells[heatmap.grid.cell_index(cell.i,
                                                              cell.j)];
    require(score.has_value(), "missing score in the low-contrast column");
    const double gap = ooc_score - score->mean_dice;
    worst_gap = std::min(worst_gap, gap);
    ++column_cells;
  }
  require(column_cells == 10, "expected 10 plausible cells at theta1=0.05");
  require(worst_gap >= 0.05,
          "smallest OOC margin over the theta1=0.05 column is " +
              fmt(worst_gap));
  out << "OOC score " << fmt(ooc_score) << " beats the theta1=0.05 column "
      << "by at least " << fmt(worst_gap) << " Dice";
}

}  // namespace

int main() {
  const struct {
    const char* name;
    std::function<void(std::ostream&)> run;
  } criteria[] = {
      {"C1 grid rejection count", criterion_grid_rejection},
      {"C2 OOC improvement with p < 0.01", criterion_ooc_improvement},
      {"C3 Wilcoxon exactness", criterion_wilcoxon_exactness},
      {"C4 Dice property suite", criterion_dice_properties},
      {"C5 harmonization fidelity", criterion_harmonization_fidelity},
      {"C6 determinism and parallel equivalence", criterion_determinism},
      {"C7 contrast-sensitivity shape", criterion_contrast_sensitivity},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    std::ostringstream detail;
    try {
      criterion.run(detail);
      std::cout << "[PASS] " << criterion.name << ": " << detail.str()
                << "\n";
    } catch (const std::exception& e) {
      std::cout << "[FAIL] " << criterion.name << ": " << e.what() << "\n";
      ++failures;
    }
  }
  if (failures > 0)
    std::cout << failures << " criterion(s) failed\n";
  else
    std::cout << "all acceptance criteria passed\n";
  return failures == 0 ? 0 : 1;
}
