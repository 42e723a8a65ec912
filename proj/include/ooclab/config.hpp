#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "ooclab/contrast.hpp"
#include "ooclab/phantom.hpp"
#include "ooclab/search.hpp"

namespace ooclab {

/// Everything tunable about a pipeline run. Defaults reproduce the standard
/// experiment; a flat `key = value` file (with `#` comments) overrides them,
/// and CLI flags override the file. Unknown keys are rejected.
struct Config {
  // Contrast grid.
  GridBounds grid_bounds;
  Eigen::Vector2i grid_resolution{10, 10};

  // Rendering.
  double noise_sigma = 0.02;
  double blur_fwhm_vox = 1.2;

  // Phantom.
  Eigen::Vector3i phantom_dims{64, 64, 64};
  Eigen::Vector3d phantom_spacing{1.0, 1.0, 1.0};
  double jitter_axes = 0.08;
  double jitter_center = 0.02;

  // Segmenter training contrast.
  ContrastTheta theta_train{0.5, 0.5};

  // Cohorts.
  int tuning_subjects = 8;
  std::uint64_t tuning_seed_start = 0;
  int test_subjects = 35;
  std::uint64_t test_seed_start = 100;

  // Experiment seeds.
  std::uint64_t grid_base_seed = 101;
  std::uint64_t eval_base_seed = 202;

  // Paths and execution.
  std::filesystem::path cohort_dir = "cohort";
  std::filesystem::path out_dir = "out";
  int jobs = 1;

  PhantomParams phantom_params() const;
  RenderParams render_params(std::uint64_t render_seed = 0) const;

  /// Range-checks every field; throws ConfigError on violations.
  void validate() const;
};

/// Parses a config file over the given defaults. Throws ConfigError for
/// unknown keys or bad values, IoError if the file cannot be read.
Config load_config(const std::filesystem::path& path,
                   const Config& defaults = {});

/// Same, from text (used by tests and for documentation examples).
Config parse_config(const std::string& text, const Config& defaults = {});

}  // namespace ooclab
