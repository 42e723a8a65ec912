#include "ooclab/search.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ooclab/errors.hpp"
#include "ooclab/parallel.hpp"
#include "ooclab/rng.hpp"

namespace ooclab {
namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

ContrastGrid build_grid(const GridBounds& bounds,
                        const Eigen::Vector2i& resolution) {
  for (int k = 0; k < 2; ++k) {
    if (resolution[k] < 1) throw InvalidGrid("grid resolution must be >= 1");
    if (!(bounds.lo[k] < bounds.hi[k]))
      throw InvalidGrid("grid bounds must be non-degenerate");
  }

  ContrastGrid grid;
  grid.bounds = bounds;
  grid.resolution = resolution;
  grid.cells.reserve(static_cast<std::size_t>(resolution.x()) *
                     static_cast<std::size_t>(resolution.y()));
  for (int i = 0; i < resolution.x(); ++i)
    for (int j = 0; j < resolution.y(); ++j) {
      GridCell cell;
      cell.i = i;
      cell.j = j;
      cell.theta.theta1 =
          bounds.lo.x() + (i + 0.5) * (bounds.hi.x() - bounds.lo.x()) /
                              resolution.x();
      cell.theta.theta2 =
          bounds.lo.y() + (j + 0.5) * (bounds.hi.y() - bounds.lo.y()) /
                              resolution.y();
      cell.plausible = t1w_plausible(cell.theta);
      grid.cells.push_back(cell);
    }
  return grid;
}

std::size_t select_ooc(const ContrastGrid& grid,
                       const std::vector<std::optional<double>>& scores) {
  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    if (!grid.cells[c].plausible || !scores[c]) continue;
    if (!best || *scores[c] > *scores[*best]) best = c;
  }
  if (!best) throw NoPlausibleCells("no plausible grid cell to select from");
  return *best;
}

HeatmapResult grid_search(const std::vector<Anatomy>& cohort,
                          const SegmenterModel& model,
                          const ContrastGrid& grid,
                          const RenderParams& base_params,
                          std::uint64_t base_seed, int jobs) {
  if (cohort.empty()) throw UsageError("grid_search: empty cohort");

  std::vector<std::size_t> plausible;
  for (std::size_t c = 0; c < grid.cells.size(); ++c)
    if (grid.cells[c].plausible) plausible.push_back(c);
  if (plausible.empty())
    throw NoPlausibleCells("every grid cell was rejected as implausible");

  const std::size_t n_subjects = cohort.size();
  const std::size_t n_cells_total = grid.cells.size();
  const std::size_t n_tasks = plausible.size() * n_subjects;

  std::vector<SubjectCellRecord> records(n_tasks);

  parallel_for(n_tasks, jobs, [&](std::size_t task) {
    const std::size_t pc = task / n_subjects;
    const std::size_t s = task % n_subjects;
    const std::size_t cell = plausible[pc];
    const GridCell& gc = grid.cells[cell];
    try {
      RenderParams params = base_params;
      params.render_seed = substream(
          base_seed, static_cast<std::uint64_t>(s) * n_cells_total + cell);
      const VoxelVolume img = render(cohort[s], gc.theta, params);
      const LabelVolume pred = segment(img, model);
      SubjectCellRecord rec;
      rec.subject_seed = cohort[s].subject_seed;
      rec.report = dice_report(pred, cohort[s].truth);
      if (!rec.report.mean_parcel)
        throw DegeneracyError("no parcel Dice defined");
      rec.mean_parcel = *rec.report.mean_parcel;
      records[task] = std::move(rec);
    } catch (const std::exception& e) {
      throw Error("cell (" + std::to_string(gc.i) + "," +
                  std::to_string(gc.j) + "), subject seed " +
                  std::to_string(cohort[s].subject_seed) + ": " + e.what());
    }
  });

  HeatmapResult result;
  result.grid = grid;
  result.cells.resize(n_cells_total);

  std::vector<std::optional<double>> scores(n_cells_total);
  for (std::size_t pc = 0; pc < plausible.size(); ++pc) {
    const std::size_t cell = plausible[pc];
    CellScore score;
    score.n_subjects = static_cast<int>(n_subjects);
    std::vector<double> per_subject;
    per_subject.reserve(n_subjects);
    for (std::size_t s = 0; s < n_subjects; ++s) {
      const SubjectCellRecord& rec = records[pc * n_subjects + s];
      per_subject.push_back(rec.mean_parcel);
      score.records.push_back(rec);
    }
    const MeanStd ms = mean_std(per_subject);
    score.mean_dice = ms.mean;
    score.std_dice = ms.stddev;
    scores[cell] = score.mean_dice;
    result.cells[cell] = std::move(score);
  }

  result.ooc_index = select_ooc(grid, scores);
  result.ooc = grid.cells[result.ooc_index].theta;
  return result;
}

std::string export_heatmap_csv(const HeatmapResult& result) {
  std::ostringstream out;
  out << "i,j,theta1,theta2,plausible,mean_dice,std_dice,n_subjects\n";
  for (const GridCell& cell : result.grid.cells) {
    const auto& score = result.cells[result.grid.cell_index(cell.i, cell.j)];
    out << cell.i << "," << cell.j << "," << fmt6(cell.theta.theta1) << ","
        << fmt6(cell.theta.theta2) << "," << (cell.plausible ? 1 : 0) << ",";
    if (score) {
      out << fmt6(score->mean_dice) << ","
          << (score->std_dice ? fmt6(*score->std_dice) : "NA") << ","
          << score->n_subjects;
    } else {
      out << "NA,NA,0";
    }
    out << "\n";
  }
  return std::move(out).str();
}

std::string render_pgm(int r1, int r2,
                       const std::vector<std::optional<double>>& scores) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const auto& s : scores) {
    if (!s) continue;
    if (!any) {
      lo = hi = *s;
      any = true;
    } else {
      lo = std::min(lo, *s);
      hi = std::max(hi, *s);
    }
  }
  if (!any) throw NoPlausibleCells("heatmap has no scored cells");

  std::string out = "P5\n" + std::to_string(r1) + " " + std::to_string(r2) +
                    "\n255\n";
  // Row 0 is the top of the image, so it carries the largest theta2.
  for (int row = 0; row < r2; ++row) {
    const int j = r2 - 1 - row;
    for (int i = 0; i < r1; ++i) {
      const auto& s =
          scores[static_cast<std::size_t>(i) * static_cast<std::size_t>(r2) +
                 static_cast<std::size_t>(j)];
      unsigned char pixel = 0;
      if (s) {
        pixel = hi == lo
                    ? static_cast<unsigned char>(255)
                    : static_cast<unsigned char>(
                          1 + std::lround(254.0 * (*s - lo) / (hi - lo)));
      }
      out.push_back(static_cast<char>(pixel));
    }
  }
  return out;
}

std::string export_heatmap_pgm(const HeatmapResult& result) {
  std::vector<std::optional<double>> scores(result.cells.size());
  for (std::size_t c = 0; c < result.cells.size(); ++c)
    if (result.cells[c]) scores[c] = result.cells[c]->mean_dice;
  return render_pgm(result.grid.resolution.x(), result.grid.resolution.y(),
                    scores);
}

}  // namespace ooclab
