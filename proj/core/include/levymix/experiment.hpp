#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levymix/functional.hpp"
#include "levymix/levy.hpp"
#include "levymix/metric.hpp"

namespace levymix {

/// Full description of one experiment run, read from a key = value file.
struct ExperimentConfig {
  // model
  std::string model_kind = "stable";  // stable | brownian
  double alpha = 1.5;
  double scale = 1.0;
  int dim = 1;
  // functional
  std::string weight_kind = "cosine";  // cosine | inverse_quadratic
  std::vector<double> weight_theta;    // defaults to 1 per component
  double weight_amplitude = 1.0;
  std::vector<std::vector<double>> frequencies;  // u_0..u_m
  double lambda = 0.0;
  std::vector<double> asym_frequency;
  int window = 0;
  // grid
  double horizon = 1.0;
  std::vector<long> n_list;
  long limit_grid_n = 0;  // 0: use max(n_list)
  // mc
  long replicates = 1000;
  std::uint64_t master_seed = 20240915;
  int workers = 1;
  // metric
  std::size_t family_size = 24;
  // hypothesis flags; "auto" derives them from the model and functional
  std::optional<bool> h2_override;
  std::optional<bool> h3_override;
  // probes for the stable checks
  std::vector<double> check_times = {1.0};
  // output
  std::filesystem::path output_dir = "out";

  void validate() const;

  bool symmetric() const { return lambda == 0.0; }
  bool h2() const;
  bool h3() const;

  LevyModel model() const;
  std::shared_ptr<CosineFunctional> functional() const;
};

/// Parses the key = value config format ('#' comments, comma lists).
ExperimentConfig parse_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Predicted rate r_n selected from the hypothesis flags.
double predicted_rate(double alpha, bool symmetric_or_h2, bool h3, long n);
/// The pure power-law exponent of the selected case, NaN in log-factor cases.
double predicted_exponent(double alpha, bool symmetric_or_h2, bool h3);
/// True when the selected case carries a log factor (alpha = 1, or the
/// alpha = 2 case with H2 but not H3).
bool rate_has_log_factor(double alpha, bool symmetric_or_h2, bool h3);

struct RateRow {
  long n = 0;
  double alpha = 0.0;
  int m = 0;
  bool symmetric = false;
  bool h2 = false;
  bool h3 = false;
  double d_hat = 0.0;
  double d_stderr = 0.0;
  double r_n = 0.0;
  double beta_n = 0.0;
};

/// CSV schema is frozen: header + comma-separated rows, floats at 17
/// significant digits; wall-clock goes to a separate timing sidecar.
std::string rate_csv_header();
std::string format_rate_row(const RateRow& row);
std::vector<RateRow> read_rate_csv(const std::filesystem::path& path);

struct RateExperimentResult {
  std::filesystem::path csv_path;
  std::filesystem::path timing_path;
  std::vector<RateRow> rows;
};

/// For each n: Z batch and matched limit batch, smooth-distance estimate,
/// predicted rate; one CSV row per n. Interrupted runs resume from the
/// partial CSV when the config hash matches.
RateExperimentResult run_rate_experiment(const ExperimentConfig& config);

struct RateVerdict {
  double fitted_slope = 0.0;
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  double predicted_exponent = 0.0;
  bool log_factor_mode = false;  // fitted against log r_n instead of log n
  bool bound_respected = false;
  double c_hat = 0.0;
  bool underpowered = false;
  long usable_rows = 0;
};

/// SE-weighted least squares of log d_hat; the bound check calibrates C on
/// the smallest n and allows a 3 SE cushion per row.
RateVerdict fit_rate(const std::filesystem::path& csv_path);

/// Two-column (log n, log d_hat) and (log n, log r_n) files plus a minimal
/// SVG; byte-stable given byte-identical input.
struct PlotArtifacts {
  std::filesystem::path dhat_path;
  std::filesystem::path rn_path;
  std::filesystem::path svg_path;
};
PlotArtifacts emit_plot_data(const std::filesystem::path& csv_path);

/// 17-significant-digit float formatting shared by every emitter.
std::string format_float(double v);

}  // namespace levymix
