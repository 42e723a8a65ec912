#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "ooclab/phantom.hpp"

namespace ooclab {

struct CohortSpec {
  std::uint64_t seed_start = 0;
  int count = 0;
};

/// Generates `count` subjects with consecutive seeds, in memory.
std::vector<Anatomy> generate_cohort(const CohortSpec& spec,
                                     const PhantomParams& params);

/// Writes sub-<seed>_tissue.nrrd / sub-<seed>_truth.nrrd per subject.
void write_cohort(const std::filesystem::path& dir, const CohortSpec& spec,
                  const PhantomParams& params);

/// Loads every sub-<seed>_tissue.nrrd / _truth.nrrd pair in the directory,
/// sorted by seed. Label schemes are validated on load.
std::vector<Anatomy> load_cohort(const std::filesystem::path& dir);

}  // namespace ooclab
