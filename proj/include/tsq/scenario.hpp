#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsq/grid.hpp"
#include "tsq/potential.hpp"

namespace tsq {

// Parsed and validated scenario description. Sections map onto the INI
// blocks [grid], [source], [detector], [obstacle], [mzi], [run]; the
// scenario name is the required `scenario` key of [run].
struct ScenarioConfig {
  struct GridBlock {
    double xmin = 0, xmax = 0;
    long nx = 0;
    bool two_d = false;
    double ymin = 0, ymax = 0;
    long ny = 0;
  };
  struct EventBlock {
    double x = 0, y = 0, t = 0;
  };
  struct ObstacleBlock {
    double radius = 30.0;
    double theta_start = 0.0;
    double theta_end = 1.5707963267948966;  // quarter arc, upper-right quadrant
    double thickness = 2.0;
    ArcMode mode = ArcMode::barrier;
    double strength = 1000.0;
  };
  struct MziBlock {
    double arm = 800.0;
    double source_arm = 400.0;
    double detector_arm = 400.0;
    bool block_upper = true;
    double k = 0.4;
    double sigma = 50.0;  // initial packet standard deviation
  };
  struct RunBlock {
    std::vector<double> sample_times;  // empty -> derived from snapshots
    int snapshots = 5;
    double dt = 0.01;
    std::string output_dir = "tsq_out";
    bool emit_csv = false;
    bool emit_heatmaps = true;
    int detectors = 64;          // angular ensemble anchor count
    double absorb_time = 140.0;  // absorbed-fraction evolution span
    double absorb_dt = 0.2;
  };

  std::string scenario;
  std::optional<GridBlock> grid;
  std::optional<EventBlock> source;
  std::optional<EventBlock> detector;
  std::optional<ObstacleBlock> obstacle;
  std::optional<MziBlock> mzi;
  RunBlock run;
};

// Parses the INI-style text (key = value lines, '#' comments, C-locale
// floats) and validates it for the named scenario. Unknown sections, keys,
// or scenario names are rejected.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

// Per-run results; optional fields are filled by the scenarios that
// produce them and omitted from the report file otherwise.
struct RunReport {
  std::string scenario;
  std::optional<double> a_s_re, a_s_im, p_s, drift, continuity_residual_max;
  std::optional<double> absorbed_fraction;
  std::vector<std::pair<std::string, double>> detector_probabilities;
  std::vector<std::pair<std::string, double>> extra;
  std::vector<std::string> files;  // emitted outputs, relative to output_dir
  double wall_time_seconds = 0;    // reported on stdout only, never in files
};

// Executes the scenario, emits outputs per the run block, returns the report.
RunReport run_scenario(const ScenarioConfig& cfg);

// Report serialization used by run_scenario and the CLI (12 significant
// digits, LF endings, fixed key order).
std::string format_report(const RunReport& report);

namespace emit {

// Snapshot CSV: header x,y,re_rho,im_rho; row-major rows; 9 significant
// digits; LF endings.
void write_snapshot_csv(const std::string& path, const ComplexField<double>& field);

// Binary P6 heatmap with the diverging map (positive -> red, negative ->
// blue) for a re/im channel; values are normalized by max_abs_value.
// Row 0 is the ymax row.
void write_diverging_ppm(const std::string& path, const ComplexField<double>& field,
                         bool imaginary_part, double max_abs_value);

// Linear grayscale P5 heatmap of |field| normalized by max_abs_value.
void write_abs_pgm(const std::string& path, const ComplexField<double>& field,
                   double max_abs_value);

// Emits CSVs/heatmaps for the snapshot sequence plus the report file;
// returns the emitted file names (report last). Byte-identical across
// reruns with the same config.
std::vector<std::string> emit_outputs(RunReport& report,
                                      const std::vector<std::pair<double, ComplexField<double>>>& snapshots,
                                      const ScenarioConfig& cfg);

}  // namespace emit

inline constexpr const char* version_string = "0.1.0";

}  // namespace tsq
