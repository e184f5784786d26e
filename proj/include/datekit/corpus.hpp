#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "datekit/domain.hpp"

namespace datekit {

inline constexpr std::size_t kMaxReferences = 3;

/// One audio item: a candidate text plus its ordered reference variants.
struct EvalRecord {
  std::string id;
  Task task = Task::Caption;
  SubCategory sub_category = CaptionSubCategory::Long;
  DomainCode domain;
  std::string candidate;  // may be empty
  std::vector<std::string> references;

  friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

/// Validated, immutable list of records sharing one task with unique ids.
class Corpus {
 public:
  /// Throws InputError when any record violates the corpus invariants.
  Corpus(Task task, std::vector<EvalRecord> records);

  Task task() const { return task_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<EvalRecord>& records() const { return records_; }
  const EvalRecord& operator[](std::size_t i) const { return records_[i]; }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  Task task_;
  std::vector<EvalRecord> records_;
};

/// Reads one JSON record object per line. Blank lines are skipped; errors
/// name the 1-based line number. Non-fatal notes (ignored keys, defaulted QA
/// domains) are appended to `warnings` when given.
Corpus parse_corpus(std::istream& in, Task task, std::vector<std::string>* warnings = nullptr);

/// Joins a references file (records without candidates) with a candidates
/// file of {"id", "candidate"} lines. Every record needs exactly one candidate.
Corpus parse_split_corpus(std::istream& references, std::istream& candidates, Task task,
                          std::vector<std::string>* warnings = nullptr);

void write_corpus(std::ostream& out, const Corpus& corpus);

enum class GroupKey { SubCategory, Domain, SubCategoryDomain };

struct RecordGroup {
  std::string key;  // e.g. "long", "S0A", "speech/S0A"
  std::vector<std::size_t> indices;
};

/// Groups record indices by key, groups ordered by first appearance.
std::vector<RecordGroup> group_by(const Corpus& corpus, GroupKey key);

}  // namespace datekit
