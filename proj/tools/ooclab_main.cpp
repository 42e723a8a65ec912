// ooclab: find the optimal operating contrast (OOC) of a fixed ventricle
// parcellation model by grid search, then boost the model on held-out
// subjects by harmonizing their contrast to the OOC.

#include <CLI11.hpp>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ooclab/cohort.hpp"
#include "ooclab/config.hpp"
#include "ooclab/errors.hpp"
#include "ooclab/evaluate.hpp"
#include "ooclab/nrrd.hpp"
#include "ooclab/search.hpp"
#include "ooclab/segmenter.hpp"
#include "ooclab/stats.hpp"

namespace {

using namespace ooclab;

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitDegenerate = 3;

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

struct CommonFlags {
  std::string config_path;
  std::string cohort_dir;
  std::string out_dir;
  int jobs = 0;

  void add_to(CLI::App* cmd, bool with_paths = true) {
    cmd->add_option("--config", config_path, "config file (key = value)");
    if (with_paths) {
      cmd->add_option("--cohort-dir", cohort_dir, "cohort directory");
      cmd->add_option("--out-dir", out_dir, "output directory");
    }
    cmd->add_option("--jobs", jobs, "worker threads");
  }

  Config make_config() const {
    Config config;
    if (!config_path.empty()) config = load_config(config_path);
    if (!cohort_dir.empty()) config.cohort_dir = cohort_dir;
    if (!out_dir.empty()) config.out_dir = out_dir;
    if (jobs != 0) config.jobs = jobs;
    config.validate();
    return config;
  }
};

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string());
}

double parse_csv_number(std::string_view field) {
  double out = 0;
  auto [p, ec] =
      std::from_chars(field.data(), field.data() + field.size(), out);
  if (ec != std::errc{} || p != field.data() + field.size())
    throw FormatError("bad numeric field '" + std::string(field) + "'");
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  const std::string bytes = read_file_bytes(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < bytes.size()) {
    std::size_t eol = bytes.find('\n', start);
    if (eol == std::string::npos) eol = bytes.size();
    std::string line = bytes.substr(start, eol - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = eol + 1;
  }
  return lines;
}

int run_cohort_generate(const CommonFlags& flags, int tuning_subjects,
                        int test_subjects) {
  Config config = flags.make_config();
  if (tuning_subjects >= 0) config.tuning_subjects = tuning_subjects;
  if (test_subjects >= 0) config.test_subjects = test_subjects;
  config.validate();

  const PhantomParams params = config.phantom_params();
  write_cohort(config.cohort_dir / "tuning",
               {config.tuning_seed_start, config.tuning_subjects}, params);
  write_cohort(config.cohort_dir / "test",
               {config.test_seed_start, config.test_subjects}, params);
  std::cout << "wrote " << config.tuning_subjects << " tuning and "
            << config.test_subjects << " test subjects under "
            << config.cohort_dir.string() << "\n";
  return 0;
}

int run_grid_search(const CommonFlags& flags) {
  const Config config = flags.make_config();
  const std::vector<Anatomy> cohort = load_cohort(config.cohort_dir /
                                                  "tuning");
  const SegmenterModel model = calibrate(config.theta_train);
  const ContrastGrid grid =
      build_grid(config.grid_bounds, config.grid_resolution);
  const HeatmapResult result =
      grid_search(cohort, model, grid, config.render_params(),
                  config.grid_base_seed, config.jobs);

  ensure_dir(config.out_dir);
  write_file_bytes(config.out_dir / "heatmap.csv",
                   export_heatmap_csv(result));
  write_file_bytes(config.out_dir / "heatmap.pgm",
                   export_heatmap_pgm(result));
  write_file_bytes(config.out_dir / "ooc.txt",
                   fmt6(result.ooc.theta1) + " " + fmt6(result.ooc.theta2) +
                       "\n");

  const auto& cell = result.ooc_cell();
  std::cout << "OOC cell (" << cell.i << "," << cell.j << ") theta = ("
            << fmt6(result.ooc.theta1) << ", " << fmt6(result.ooc.theta2)
            << "), mean Dice " << fmt6(result.cells[result.ooc_index]->mean_dice)
            << " over " << cohort.size() << " subjects\n";
  return 0;
}

ContrastTheta read_ooc_file(const std::filesystem::path& path) {
  const std::vector<std::string> lines = read_lines(path);
  if (lines.empty()) throw FormatError("empty OOC file " + path.string());
  std::istringstream in(lines[0]);
  ContrastTheta theta;
  if (!(in >> theta.theta1 >> theta.theta2))
    throw FormatError("OOC file must hold two numbers on one line");
  return theta;
}

int run_evaluate(const CommonFlags& flags,
                 const std::vector<double>& ooc_values,
                 const std::string& ooc_file) {
  const Config config = flags.make_config();

  ContrastTheta ooc;
  if (!ooc_values.empty()) {
    ooc = {ooc_values[0], ooc_values[1]};
  } else {
    const std::filesystem::path path = ooc_file.empty()
                                           ? config.out_dir / "ooc.txt"
                                           : std::filesystem::path(ooc_file);
    ooc = read_ooc_file(path);
  }
  if (!t1w_plausible(ooc))
    throw UsageError("OOC (" + fmt6(ooc.theta1) + ", " + fmt6(ooc.theta2) +
                     ") is not T1-w plausible");

  const std::vector<Anatomy> cohort = load_cohort(config.cohort_dir /
                                                  "test");
  const SegmenterModel model = calibrate(config.theta_train);
  const PairedEvaluation eval =
      evaluate_ooc(cohort, model, ooc, config.render_params(),
                   config.eval_base_seed, config.jobs);

  ensure_dir(config.out_dir);
  write_file_bytes(config.out_dir / "report.csv", export_report_csv(eval));
  write_file_bytes(config.out_dir / "summary.csv",
                   export_summary_csv(eval));

  for (const LabelSummary& s : eval.labels) {
    std::cout << s.label << ": ";
    if (s.mean_a && s.mean_b)
      std::cout << "Dice " << fmt6(*s.mean_a) << " -> " << fmt6(*s.mean_b);
    if (s.wilcoxon)
      std::cout << ", p = " << fmt6(s.wilcoxon->p_two_sided) << " ("
                << to_string(s.wilcoxon->method) << ", n_eff "
                << s.wilcoxon->n_effective << ")";
    std::cout << "\n";
  }
  return 0;
}

int run_heatmap_render(const std::string& csv_path,
                       const std::string& out_path) {
  const std::vector<std::string> lines = read_lines(csv_path);
  if (lines.empty() ||
      lines[0] != "i,j,theta1,theta2,plausible,mean_dice,std_dice,n_subjects")
    throw FormatError("not a heatmap CSV: " + csv_path);

  struct Row {
    int i, j;
    std::optional<double> dice;
  };
  std::vector<Row> rows;
  int r1 = 0, r2 = 0;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    if (lines[k].empty()) continue;
    const auto fields = split_csv_line(lines[k]);
    if (fields.size() != 8)
      throw FormatError("heatmap CSV row needs 8 fields");
    Row row;
    row.i = static_cast<int>(parse_csv_number(fields[0]));
    row.j = static_cast<int>(parse_csv_number(fields[1]));
    if (fields[5] != "NA") row.dice = parse_csv_number(fields[5]);
    r1 = std::max(r1, row.i + 1);
    r2 = std::max(r2, row.j + 1);
    rows.push_back(row);
  }
  if (rows.empty()) throw FormatError("heatmap CSV has no rows");
  if (static_cast<std::size_t>(r1) * static_cast<std::size_t>(r2) !=
      rows.size())
    throw FormatError("heatmap CSV does not cover a full grid");

  std::vector<std::optional<double>> scores(rows.size());
  for (const Row& row : rows)
    scores[static_cast<std::size_t>(row.i) * static_cast<std::size_t>(r2) +
           static_cast<std::size_t>(row.j)] = row.dice;

  write_file_bytes(out_path, render_pgm(r1, r2, scores));
  return 0;
}

int run_stats_wilcoxon(const std::string& csv_path) {
  const std::vector<std::string> lines = read_lines(csv_path);
  if (lines.empty()) throw FormatError("empty CSV " + csv_path);

  std::vector<std::pair<double, double>> pairs;
  for (std::size_t k = 1; k < lines.size(); ++k) {  // line 0 is the header
    if (lines[k].empty()) continue;
    const auto fields = split_csv_line(lines[k]);
    if (fields.size() != 2)
      throw FormatError("expected two columns in " + csv_path);
    pairs.emplace_back(parse_csv_number(fields[0]),
                       parse_csv_number(fields[1]));
  }

  const WilcoxonResult result = wilcoxon_signed_rank(pairs);
  std::cout << "n_input=" << result.n_input << "\n"
            << "n_effective=" << result.n_effective << "\n"
            << "w_plus=" << fmt6(result.w_plus) << "\n"
            << "p_two_sided=" << fmt6(result.p_two_sided) << "\n"
            << "method=" << to_string(result.method) << "\n";
  return 0;
}

int run_segment(const CommonFlags& flags, const std::string& input,
                const std::string& output, const std::string& external) {
  const Config config = flags.make_config();
  const VoxelVolume volume = read_voxel_volume_file(input);
  LabelVolume labels =
      external.empty()
          ? segment(volume, calibrate(config.theta_train))
          : segment_external(volume, external);
  write_volume_file(output, labels);

  Eigen::Index foreground = 0;
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    foreground += labels.data()[i] != 0;
  std::cout << "labeled " << foreground << " ventricle voxels\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal operating contrast laboratory"};
  app.require_subcommand(1);

  // cohort generate
  auto* cohort_cmd = app.add_subcommand("cohort", "synthetic cohort tools");
  cohort_cmd->require_subcommand(1);
  auto* generate_cmd =
      cohort_cmd->add_subcommand("generate", "write tuning and test cohorts");
  CommonFlags generate_flags;
  generate_flags.add_to(generate_cmd);
  int tuning_subjects = -1, test_subjects = -1;
  generate_cmd->add_option("--tuning-subjects", tuning_subjects,
                           "tuning cohort size");
  generate_cmd->add_option("--test-subjects", test_subjects,
                           "test cohort size");

  // grid-search
  auto* grid_cmd = app.add_subcommand(
      "grid-search", "score the contrast grid and select the OOC");
  CommonFlags grid_flags;
  grid_flags.add_to(grid_cmd);

  // evaluate
  auto* eval_cmd = app.add_subcommand(
      "evaluate", "paired original-vs-harmonized evaluation on the test "
                  "cohort");
  CommonFlags eval_flags;
  eval_flags.add_to(eval_cmd);
  std::vector<double> ooc_values;
  std::string ooc_file;
  eval_cmd->add_option("--ooc", ooc_values, "target contrast theta1 theta2")
      ->expected(2);
  eval_cmd->add_option("--ooc-file", ooc_file,
                       "file with the OOC (default <out-dir>/ooc.txt)");

  // heatmap render
  auto* heatmap_cmd = app.add_subcommand("heatmap", "heatmap tools");
  heatmap_cmd->require_subcommand(1);
  auto* render_cmd = heatmap_cmd->add_subcommand(
      "render", "regenerate the PGM image from a heatmap CSV");
  std::string heatmap_csv, heatmap_out;
  render_cmd->add_option("--csv", heatmap_csv, "heatmap CSV path")
      ->required();
  render_cmd->add_option("--out", heatmap_out, "output PGM path")->required();

  // stats wilcoxon
  auto* stats_cmd = app.add_subcommand("stats", "statistics tools");
  stats_cmd->require_subcommand(1);
  auto* wilcoxon_cmd = stats_cmd->add_subcommand(
      "wilcoxon", "paired Wilcoxon signed-rank test on a two-column CSV");
  std::string wilcoxon_csv;
  wilcoxon_cmd->add_option("csv", wilcoxon_csv, "CSV with header and columns a,b")
      ->required();

  // segment
  auto* segment_cmd =
      app.add_subcommand("segment", "parcellate a single volume");
  CommonFlags segment_flags;
  segment_flags.add_to(segment_cmd, /*with_paths=*/false);
  std::string seg_input, seg_output, seg_external;
  segment_cmd->add_option("-i,--input", seg_input, "input intensity NRRD")
      ->required();
  segment_cmd->add_option("-o,--output", seg_output, "output label NRRD")
      ->required();
  segment_cmd->add_option(
      "--external", seg_external,
      "external segmenter command with {in} and {out} placeholders");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (generate_cmd->parsed())
      return run_cohort_generate(generate_flags, tuning_subjects,
                                 test_subjects);
    if (grid_cmd->parsed()) return run_grid_search(grid_flags);
    if (eval_cmd->parsed())
      return run_evaluate(eval_flags, ooc_values, ooc_file);
    if (render_cmd->parsed())
      return run_heatmap_render(heatmap_csv, heatmap_out);
    if (wilcoxon_cmd->parsed()) return run_stats_wilcoxon(wilcoxon_csv);
    if (segment_cmd->parsed())
      return run_segment(segment_flags, seg_input, seg_output, seg_external);
    std::cerr << "error: no command\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DegeneracyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    // I/O, format, and external-process failures.
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}
