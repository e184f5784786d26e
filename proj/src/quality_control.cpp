#include "datekit/quality_control.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "datekit/error.hpp"

namespace datekit {

using nlohmann::json;

bool model_based_filter(const FilterInput& input, double threshold) {
  if (input.distractor_similarities.size() != kDistractorCount) {
    throw InputError("'" + input.id + "': expected " + std::to_string(kDistractorCount) + " distractors, got " +
                     std::to_string(input.distractor_similarities.size()));
  }
  const double mean = std::accumulate(input.distractor_similarities.begin(), input.distractor_similarities.end(), 0.0) /
                      static_cast<double>(kDistractorCount);
  return input.pair_similarity - mean >= threshold;
}

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c);
  });
  return s;
}

bool same_content(DomainCode a, DomainCode b) {
  return a.contains_speech() == b.contains_speech() && a.contains_music() == b.contains_music() &&
         a.contains_sound() == b.contains_sound();
}

}  // namespace

std::vector<std::string> rule_based_filter(const FilterInput& input, const FilterConfig& config) {
  std::vector<std::string> failed;
  if (input.llm_confidence == Confidence::Low) failed.emplace_back(kRuleConfidence);
  if (!same_content(input.classifier_domain, input.llm_domain)) failed.emplace_back(kRuleDomain);
  const auto text = lowercase(input.caption_text);
  for (const auto& pattern : config.hallucination_patterns) {
    if (!pattern.empty() && text.find(lowercase(pattern)) != std::string::npos) {
      failed.emplace_back(kRuleHallucination);
      break;
    }
  }
  return failed;
}

FilterResult filter_corpus(std::span<const FilterInput> inputs, const FilterConfig& config) {
  // Validate up front so the parallel loop cannot throw.
  for (const auto& in : inputs) {
    if (in.distractor_similarities.size() != kDistractorCount) model_based_filter(in, config.threshold);
  }

  FilterResult result;
  result.verdicts.resize(inputs.size());
  const auto count = static_cast<std::int64_t>(inputs.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < count; ++i) {
    const auto& in = inputs[static_cast<std::size_t>(i)];
    auto& v = result.verdicts[static_cast<std::size_t>(i)];
    v.id = in.id;
    if (!model_based_filter(in, config.threshold)) v.failed_rules.emplace_back(kRuleModel);
    for (auto& rule : rule_based_filter(in, config)) v.failed_rules.push_back(std::move(rule));
    v.keep = v.failed_rules.empty();
  }

  for (auto rule : {kRuleModel, kRuleConfidence, kRuleDomain, kRuleHallucination}) {
    result.failures_by_rule[std::string(rule)] = 0;
  }
  for (const auto& v : result.verdicts) {
    if (v.keep) {
      result.kept_ids.push_back(v.id);
    } else {
      ++result.rejected;
    }
    for (const auto& rule : v.failed_rules) ++result.failures_by_rule[rule];
  }
  return result;
}

std::vector<FilterInput> parse_filter_inputs(std::istream& in) {
  std::vector<FilterInput> out;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line) + ": ";
    try {
      const auto obj = json::parse(text);
      FilterInput fi;
      fi.id = obj.at("id").get<std::string>();
      fi.pair_similarity = obj.at("pair_similarity").get<double>();
      fi.distractor_similarities = obj.at("distractor_similarities").get<std::vector<double>>();
      if (fi.distractor_similarities.size() != kDistractorCount) {
        throw InputError(where + "expected " + std::to_string(kDistractorCount) + " distractor similarities");
      }
      auto confidence = obj.at("llm_confidence").get<std::string>();
      for (auto& ch : confidence) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      if (confidence == "high") {
        fi.llm_confidence = Confidence::High;
      } else if (confidence == "low") {
        fi.llm_confidence = Confidence::Low;
      } else {
        throw InputError(where + "llm_confidence must be 'high' or 'low'");
      }
      fi.classifier_domain = DomainCode::from_string(obj.at("classifier_domain").get<std::string>());
      fi.llm_domain = DomainCode::from_string(obj.at("llm_domain").get<std::string>());
      fi.caption_text = obj.at("caption_text").get<std::string>();
      out.push_back(std::move(fi));
    } catch (const json::exception& e) {
      throw InputError(where + "malformed filter input: " + e.what());
    } catch (const InputError& e) {
      const std::string msg = e.what();
      throw InputError(msg.starts_with("line ") ? msg : where + msg);
    }
  }
  return out;
}

void write_verdicts(std::ostream& out, const FilterResult& result) {
  for (const auto& v : result.verdicts) {
    out << json{{"id", v.id}, {"keep", v.keep}, {"failed_rules", v.failed_rules}}.dump() << '\n';
  }
}

}  // namespace datekit
