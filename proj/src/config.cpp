#include "ooclab/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "ooclab/errors.hpp"
#include "ooclab/nrrd.hpp"

namespace ooclab {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double to_double(const std::string& key, std::string_view value) {
  double out = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                 out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw ConfigError("config: bad number for " + key + ": '" +
                      std::string(value) + "'");
  return out;
}

long long to_int(const std::string& key, std::string_view value) {
  long long out = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                 out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw ConfigError("config: bad integer for " + key + ": '" +
                      std::string(value) + "'");
  return out;
}

std::uint64_t to_u64(const std::string& key, std::string_view value) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(),
                                 out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw ConfigError("config: bad seed for " + key + ": '" +
                      std::string(value) + "'");
  return out;
}

}  // namespace

PhantomParams Config::phantom_params() const {
  PhantomParams params;
  params.dims = phantom_dims;
  params.spacing = phantom_spacing;
  params.jitter_axes = jitter_axes;
  params.jitter_center = jitter_center;
  return params;
}

RenderParams Config::render_params(std::uint64_t render_seed) const {
  return RenderParams{noise_sigma, blur_fwhm_vox, render_seed};
}

void Config::validate() const {
  const auto fail = [](const std::string& what) {
    throw ConfigError("config: " + what);
  };
  for (int k = 0; k < 2; ++k) {
    if (!(grid_bounds.lo[k] < grid_bounds.hi[k]))
      fail("grid bounds must satisfy lo < hi");
    if (grid_resolution[k] < 1) fail("grid resolution must be >= 1");
  }
  if (noise_sigma < 0) fail("noise_sigma must be >= 0");
  if (blur_fwhm_vox < 0) fail("blur_fwhm_vox must be >= 0");
  if ((phantom_dims.array() < 2).any()) fail("phantom dims must be >= 2");
  if ((phantom_dims.array() > 512).any()) fail("phantom dims must be <= 512");
  if (!(phantom_spacing.array() > 0).all())
    fail("phantom spacing must be positive");
  if (jitter_axes < 0 || jitter_axes >= 1)
    fail("jitter_axes must be in [0, 1)");
  if (jitter_center < 0) fail("jitter_center must be >= 0");
  if (theta_train.theta1 < 0 || theta_train.theta1 > 1 ||
      theta_train.theta2 < 0 || theta_train.theta2 > 1)
    fail("theta_train must lie in [0,1]^2");
  if (tuning_subjects < 1) fail("tuning_subjects must be >= 1");
  if (test_subjects < 1) fail("test_subjects must be >= 1");
  if (jobs < 1) fail("jobs must be >= 1");
}

Config parse_config(const std::string& text, const Config& defaults) {
  Config config = defaults;

  const std::map<std::string, std::function<void(std::string_view)>,
                 std::less<>>
      setters = {
          {"grid_lo1", [&](auto v) { config.grid_bounds.lo.x() = to_double("grid_lo1", v); }},
          {"grid_hi1", [&](auto v) { config.grid_bounds.hi.x() = to_double("grid_hi1", v); }},
          {"grid_lo2", [&](auto v) { config.grid_bounds.lo.y() = to_double("grid_lo2", v); }},
          {"grid_hi2", [&](auto v) { config.grid_bounds.hi.y() = to_double("grid_hi2", v); }},
          {"grid_res1", [&](auto v) { config.grid_resolution.x() = static_cast<int>(to_int("grid_res1", v)); }},
          {"grid_res2", [&](auto v) { config.grid_resolution.y() = static_cast<int>(to_int("grid_res2", v)); }},
          {"noise_sigma", [&](auto v) { config.noise_sigma = to_double("noise_sigma", v); }},
          {"blur_fwhm_vox", [&](auto v) { config.blur_fwhm_vox = to_double("blur_fwhm_vox", v); }},
          {"phantom_nx", [&](auto v) { config.phantom_dims.x() = static_cast<int>(to_int("phantom_nx", v)); }},
          {"phantom_ny", [&](auto v) { config.phantom_dims.y() = static_cast<int>(to_int("phantom_ny", v)); }},
          {"phantom_nz", [&](auto v) { config.phantom_dims.z() = static_cast<int>(to_int("phantom_nz", v)); }},
          {"phantom_sx", [&](auto v) { config.phantom_spacing.x() = to_double("phantom_sx", v); }},
          {"phantom_sy", [&](auto v) { config.phantom_spacing.y() = to_double("phantom_sy", v); }},
          {"phantom_sz", [&](auto v) { config.phantom_spacing.z() = to_double("phantom_sz", v); }},
          {"jitter_axes", [&](auto v) { config.jitter_axes = to_double("jitter_axes", v); }},
          {"jitter_center", [&](auto v) { config.jitter_center = to_double("jitter_center", v); }},
          {"theta_train1", [&](auto v) { config.theta_train.theta1 = to_double("theta_train1", v); }},
          {"theta_train2", [&](auto v) { config.theta_train.theta2 = to_double("theta_train2", v); }},
          {"tuning_subjects", [&](auto v) { config.tuning_subjects = static_cast<int>(to_int("tuning_subjects", v)); }},
          {"tuning_seed_start", [&](auto v) { config.tuning_seed_start = to_u64("tuning_seed_start", v); }},
          {"test_subjects", [&](auto v) { config.test_subjects = static_cast<int>(to_int("test_subjects", v)); }},
          {"test_seed_start", [&](auto v) { config.test_seed_start = to_u64("test_seed_start", v); }},
          {"grid_base_seed", [&](auto v) { config.grid_base_seed = to_u64("grid_base_seed", v); }},
          {"eval_base_seed", [&](auto v) { config.eval_base_seed = to_u64("eval_base_seed", v); }},
          {"cohort_dir", [&](auto v) { config.cohort_dir = std::string(v); }},
          {"out_dir", [&](auto v) { config.out_dir = std::string(v); }},
          {"jobs", [&](auto v) { config.jobs = static_cast<int>(to_int("jobs", v)); }},
      };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end())
      throw ConfigError("config: unknown key '" + key + "'");
    it->second(value);
  }

  config.validate();
  return config;
}

Config load_config(const std::filesystem::path& path,
                   const Config& defaults) {
  return parse_config(read_file_bytes(path), defaults);
}

}  // namespace ooclab
