#include "ooclab/cohort.hpp"

#include <algorithm>
#include <charconv>

#include "ooclab/errors.hpp"
#include "ooclab/nrrd.hpp"

namespace ooclab {
namespace {

std::filesystem::path tissue_name(std::uint64_t seed) {
  return "sub-" + std::to_string(seed) + "_tissue.nrrd";
}

std::filesystem::path truth_name(std::uint64_t seed) {
  return "sub-" + std::to_string(seed) + "_truth.nrrd";
}

void validate_scheme(const LabelVolume& v, bool is_tissue,
                     const std::filesystem::path& path) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const std::uint8_t code = v.data()[i];
    const bool ok = is_tissue ? tissue::valid(code) : parcel::valid(code);
    if (!ok)
      throw LabelRangeError("label code " + std::to_string(code) +
                            " out of scheme in " + path.string());
  }
}

}  // namespace

std::vector<Anatomy> generate_cohort(const CohortSpec& spec,
                                     const PhantomParams& params) {
  if (spec.count < 1) throw UsageError("cohort size must be at least 1");
  std::vector<Anatomy> cohort;
  cohort.reserve(static_cast<std::size_t>(spec.count));
  for (int k = 0; k < spec.count; ++k)
    cohort.push_back(generate_anatomy(
        spec.seed_start + static_cast<std::uint64_t>(k), params));
  return cohort;
}

void write_cohort(const std::filesystem::path& dir, const CohortSpec& spec,
                  const PhantomParams& params) {
  if (spec.count < 1) throw UsageError("cohort size must be at least 1");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string());

  for (int k = 0; k < spec.count; ++k) {
    const std::uint64_t seed = spec.seed_start + static_cast<std::uint64_t>(k);
    const Anatomy anatomy = generate_anatomy(seed, params);
    write_volume_file(dir / tissue_name(seed), anatomy.tissue);
    write_volume_file(dir / truth_name(seed), anatomy.truth);
  }
}

std::vector<Anatomy> load_cohort(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("cohort directory " + dir.string() + " does not exist");

  std::vector<std::uint64_t> seeds;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    constexpr std::string_view prefix = "sub-";
    constexpr std::string_view suffix = "_tissue.nrrd";
    if (name.size() <= prefix.size() + suffix.size()) continue;
    if (name.rfind(prefix, 0) != 0 ||
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0)
      continue;
    const std::string_view digits(name.data() + prefix.size(),
                                  name.size() - prefix.size() -
                                      suffix.size());
    std::uint64_t seed = 0;
    auto [p, err] =
        std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (err != std::errc{} || p != digits.data() + digits.size()) continue;
    seeds.push_back(seed);
  }
  if (seeds.empty())
    throw IoError("no subjects found in " + dir.string());
  std::sort(seeds.begin(), seeds.end());

  std::vector<Anatomy> cohort;
  cohort.reserve(seeds.size());
  for (std::uint64_t seed : seeds) {
    const auto tissue_path = dir / tissue_name(seed);
    const auto truth_path = dir / truth_name(seed);
    LabelVolume tissue_map = read_label_volume_file(tissue_path);
    LabelVolume truth = read_label_volume_file(truth_path);
    validate_scheme(tissue_map, true, tissue_path);
    validate_scheme(truth, false, truth_path);
    if (!tissue_map.same_dims(truth))
      throw ShapeMismatch("tissue/truth dims differ for subject seed " +
                          std::to_string(seed));
    cohort.push_back(
        Anatomy{std::move(tissue_map), std::move(truth), seed});
  }
  return cohort;
}

}  // namespace ooclab
