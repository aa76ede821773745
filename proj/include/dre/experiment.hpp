#ifndef DRE_EXPERIMENT_HPP
#define DRE_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dre {

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kCodeVersion = "dre-0.1.0";

/// A config field is missing, malformed, or out of range. field() names it.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class ExperimentKind { env, extrema, diffuse, renewal, levy, verify };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::levy;
  double kappa = 0.5;
  /// Exactly one of t and h_t is set; h_t = log t - (log t)^beta.
  std::optional<double> t;
  std::optional<double> h_t;
  /// Negative means the default min(0.1, (1/kappa - 1)/6).
  double delta = -1.0;
  double beta = 0.5;
  double dt = 0.02;
  double dt_b = 1e-4;
  double dx = 0.5;
  double bin_width = 0.5;
  /// Negative means the budgeted cutoff (see cutoff_for_budget).
  double eps = -1.0;
  double eps_budget = 5e-3;
  double L_cut = 30.0;
  /// Size of the R_kappa pool used as jump marks.
  std::size_t pool_size = 10'000;
  bool strict_marks = false;
  double stop_depth = 30.0;
  std::size_t replicas = 1000;
  std::uint64_t base_seed = 1;
  std::string output_dir = "out";
  /// verify only: criteria to run (empty = all) and a replica-count multiplier.
  std::vector<int> criteria;
  double scale = 1.0;

  /// The derived h_t (from t when only t is given).
  double resolved_h_t() const;
  double resolved_delta() const;
  void validate() const;
};

std::string to_string(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& s);

/// Parses a config document. A manifest written by run() is accepted too: its
/// "config" member is used.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& file);

struct RunResult {
  std::vector<std::filesystem::path> files;
  /// False when a verify run has a failing criterion.
  bool ok = true;
};

/// Runs the experiment and writes `<kind>.csv` (verify: verify.json and
/// acceptance.csv) plus manifest.json into config.output_dir.
RunResult run(const ExperimentConfig& config);

struct CompareReport {
  double statistic = 0.0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  /// Pooled sorted sample points with both ECDFs evaluated there.
  std::vector<double> grid;
  std::vector<double> ecdf_a;
  std::vector<double> ecdf_b;
};

/// Two-sample KS between a numeric column of each CSV file; NaN cells are
/// dropped. Throws CsvError when a column is missing.
CompareReport compare(const std::filesystem::path& file_a, const std::filesystem::path& file_b,
                      const std::string& column_a, const std::string& column_b);

void write_compare_csv(const CompareReport& r, std::ostream& os);

}  // namespace dre

#endif  // DRE_EXPERIMENT_HPP
