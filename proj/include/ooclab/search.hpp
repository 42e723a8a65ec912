#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ooclab/contrast.hpp"
#include "ooclab/metrics.hpp"
#include "ooclab/phantom.hpp"
#include "ooclab/segmenter.hpp"

namespace ooclab {

struct GridBounds {
  Eigen::Vector2d lo{0.0, 0.0};
  Eigen::Vector2d hi{1.0, 1.0};
};

struct GridCell {
  int i = 0;  // theta1 axis
  int j = 0;  // theta2 axis
  ContrastTheta theta;  // cell center
  bool plausible = false;
};

/// Regular grid over the contrast space. Cells are stored i-major
/// (index = i * R2 + j) with centers at lo + (i + 0.5) * (hi - lo) / R.
struct ContrastGrid {
  GridBounds bounds;
  Eigen::Vector2i resolution{10, 10};
  std::vector<GridCell> cells;

  std::size_t cell_index(int i, int j) const {
    return static_cast<std::size_t>(i) *
               static_cast<std::size_t>(resolution.y()) +
           static_cast<std::size_t>(j);
  }
};

ContrastGrid build_grid(const GridBounds& bounds,
                        const Eigen::Vector2i& resolution);

/// Dice of one tuning subject at one grid cell.
struct SubjectCellRecord {
  std::uint64_t subject_seed = 0;
  DiceReport report;
  double mean_parcel = 0.0;
};

/// Aggregate score of one plausible cell over the tuning cohort.
struct CellScore {
  double mean_dice = 0.0;
  std::optional<double> std_dice;  // sample std; empty for one subject
  int n_subjects = 0;
  std::vector<SubjectCellRecord> records;
};

struct HeatmapResult {
  ContrastGrid grid;
  std::vector<std::optional<CellScore>> cells;  // empty for rejected cells
  std::size_t ooc_index = 0;
  ContrastTheta ooc;

  const GridCell& ooc_cell() const { return grid.cells[ooc_index]; }
};

/// Index of the plausible cell with the highest score; ties break toward
/// smaller i, then smaller j. `scores` entries for rejected cells are
/// ignored and may be empty.
std::size_t select_ooc(const ContrastGrid& grid,
                       const std::vector<std::optional<double>>& scores);

/// Renders every tuning subject at every plausible cell, segments with the
/// fixed model, and scores each cell as the cohort mean of per-subject mean
/// parcel Dice. Rendering for subject index s at cell index c is seeded with
/// substream(base_seed, s * R1 * R2 + c), so any worker count reproduces the
/// sequential result bit for bit.
HeatmapResult grid_search(const std::vector<Anatomy>& cohort,
                          const SegmenterModel& model,
                          const ContrastGrid& grid,
                          const RenderParams& base_params,
                          std::uint64_t base_seed, int jobs = 1);

/// CSV rows i-major then j; rejected cells carry NA scores. Byte-exact.
std::string export_heatmap_csv(const HeatmapResult& result);

/// Binary PGM (P5), theta1 left-to-right, theta2 bottom-to-top. Rejected
/// cells are 0; plausible scores map linearly onto 1..255.
std::string export_heatmap_pgm(const HeatmapResult& result);

/// PGM from per-cell scores in i-major order (empty = rejected); the
/// building block shared by export_heatmap_pgm and `heatmap render`.
std::string render_pgm(int r1, int r2,
                       const std::vector<std::optional<double>>& scores);

}  // namespace ooclab
