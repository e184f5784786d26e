#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "datekit/domain.hpp"

namespace datekit {

inline constexpr std::size_t kDistractorCount = 6;
inline constexpr double kDefaultMarginThreshold = 6.0;

enum class Confidence { High, Low };

/// Precomputed audio-text similarities (0-100 points) and annotation
/// metadata for one candidate sample.
struct FilterInput {
  std::string id;
  double pair_similarity = 0.0;
  std::vector<double> distractor_similarities;
  Confidence llm_confidence = Confidence::High;
  DomainCode classifier_domain;
  DomainCode llm_domain;
  std::string caption_text;
};

struct FilterConfig {
  double threshold = kDefaultMarginThreshold;
  /// Case-insensitive substrings; empty by default.
  std::vector<std::string> hallucination_patterns;
};

inline constexpr std::string_view kRuleModel = "model_similarity";
inline constexpr std::string_view kRuleConfidence = "confidence";
inline constexpr std::string_view kRuleDomain = "domain";
inline constexpr std::string_view kRuleHallucination = "hallucination";

/// Passes when pair_similarity - mean(distractors) >= threshold. Throws
/// InputError unless exactly six distractors are given.
bool model_based_filter(const FilterInput& input, double threshold = kDefaultMarginThreshold);

/// Names of the failed rule-based checks, empty when all pass.
std::vector<std::string> rule_based_filter(const FilterInput& input, const FilterConfig& config);

struct FilterVerdict {
  std::string id;
  bool keep = true;
  std::vector<std::string> failed_rules;
};

struct FilterResult {
  std::vector<FilterVerdict> verdicts;  // input order
  std::vector<std::string> kept_ids;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> failures_by_rule;
};

FilterResult filter_corpus(std::span<const FilterInput> inputs, const FilterConfig& config);

/// One JSON object per line; errors name the line number.
std::vector<FilterInput> parse_filter_inputs(std::istream& in);
void write_verdicts(std::ostream& out, const FilterResult& result);

}  // namespace datekit
