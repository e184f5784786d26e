#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "datekit/aggregation.hpp"
#include "datekit/analysis.hpp"
#include "datekit/baseline.hpp"
#include "datekit/date_metric.hpp"
#include "datekit/embedder.hpp"
#include "datekit/quality_control.hpp"

namespace datekit {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

enum class Command { Score, Compare, Filter, Tiers };

std::string_view to_string(Command command);

struct RunConfig {
  Command command = Command::Score;

  // Either a combined corpus file or a references + candidates pair.
  std::optional<std::filesystem::path> corpus;
  std::optional<std::filesystem::path> references;
  std::optional<std::filesystem::path> candidates;
  std::optional<std::filesystem::path> filter_inputs;

  Task task = Task::Caption;
  std::vector<MetricId> metrics{MetricId::Date};
  EmbedderConfig embedder;
  MatrixScope matrix_scope = MatrixScope::PerSubCategory;
  MatrixReference matrix_reference = MatrixReference::FirstVariant;
  AggConvention agg_convention = AggConvention::CellMean;
  std::uint64_t seed = kDefaultTierSeed;
  std::optional<std::string> safe_template;

  double threshold = kDefaultMarginThreshold;
  std::optional<std::filesystem::path> hallucination_patterns;

  std::filesystem::path out;
  std::optional<std::filesystem::path> matrix_dump;
  std::optional<std::filesystem::path> plot_csv;
  std::optional<std::filesystem::path> idf_dump;

  /// Throws InputError when a referenced input is missing or the
  /// combination of inputs does not fit the command.
  void validate() const;
};

nlohmann::json config_echo(const RunConfig& config);

/// Scores the corpus with every configured metric and writes the report to
/// `config.out` (atomically). Human-readable tables go to `console`.
/// `embedder` overrides the configured backend when non-null.
nlohmann::json run_score(const RunConfig& config, std::ostream& console, const Embedder* embedder = nullptr);

/// Builds Right/Safe/Wrong tiers from the corpus, scores them and writes the
/// discrimination report.
nlohmann::json run_compare(const RunConfig& config, std::ostream& console, const Embedder* embedder = nullptr);

/// Writes verdict lines to `config.out` and a summary to `<out>.summary.json`.
nlohmann::json run_filter(const RunConfig& config, std::ostream& console);

/// Writes right.jsonl, safe.jsonl and wrong.jsonl into the `config.out` directory.
void run_tiers(const RunConfig& config, std::ostream& console);

/// Writes to a sibling temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& contents);

/// Report rendering shared by the runs, exposed for tests.
std::string dump_report(const nlohmann::json& report);

}  // namespace datekit
