#include "datekit/corpus.hpp"

#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "datekit/error.hpp"

namespace datekit {

using nlohmann::json;

Corpus::Corpus(Task task, std::vector<EvalRecord> records) : task_(task), records_(std::move(records)) {
  std::unordered_set<std::string> seen;
  for (const auto& r : records_) {
    if (r.id.empty()) throw InputError("record with empty id");
    if (!seen.insert(r.id).second) throw InputError("duplicate id '" + r.id + "'");
    if (r.task != task_ || task_of(r.sub_category) != task_) {
      throw InputError("record '" + r.id + "' does not match corpus task " + std::string(to_string(task_)));
    }
    if (r.references.empty()) throw InputError("record '" + r.id + "' has no references");
    if (r.references.size() > kMaxReferences) {
      throw InputError("record '" + r.id + "' has more than " + std::to_string(kMaxReferences) +
                       " references");
    }
  }
}

namespace {

const std::unordered_set<std::string> kKnownKeys{"id",     "task",      "sub_category", "domain",
                                                 "candidate", "references"};

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

std::string require_string(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw InputError(at_line(line) + "missing key '" + key + "'");
  if (!it->is_string()) throw InputError(at_line(line) + "key '" + key + "' must be a string");
  return it->get<std::string>();
}

struct LineReader {
  std::istream& in;
  std::size_t line = 0;

  // Returns false at end of stream; skips blank lines.
  bool next(json& out) {
    std::string text;
    while (std::getline(in, text)) {
      ++line;
      if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        out = json::parse(text);
      } catch (const json::parse_error& e) {
        throw InputError(at_line(line) + "malformed record: " + e.what());
      }
      if (!out.is_object()) throw InputError(at_line(line) + "record must be a JSON object");
      return true;
    }
    return false;
  }
};

EvalRecord parse_record(const json& obj, Task task, std::size_t line, bool candidate_required,
                        std::vector<std::string>* warnings) {
  EvalRecord r;
  r.id = require_string(obj, "id", line);
  if (r.id.empty()) throw InputError(at_line(line) + "empty id");

  const auto task_text = require_string(obj, "task", line);
  auto parsed_task = parse_task(task_text);
  if (!parsed_task) throw InputError(at_line(line) + "unknown task '" + task_text + "'");
  if (*parsed_task != task) {
    throw InputError(at_line(line) + "task '" + task_text + "' does not match corpus task '" +
                     std::string(to_string(task)) + "'");
  }
  r.task = task;

  const auto sub_text = require_string(obj, "sub_category", line);
  auto sub = parse_sub_category(sub_text);
  if (!sub) throw InputError(at_line(line) + "unknown sub_category '" + sub_text + "'");
  if (task_of(*sub) != task) {
    throw InputError(at_line(line) + "sub_category '" + sub_text + "' does not belong to task '" +
                     std::string(to_string(task)) + "'");
  }
  r.sub_category = *sub;

  if (obj.contains("domain")) {
    const auto domain_text = require_string(obj, "domain", line);
    auto domain = DomainCode::parse(domain_text);
    if (!domain) throw InputError(at_line(line) + "unknown domain code '" + domain_text + "'");
    r.domain = *domain;
  } else if (task == Task::QA) {
    if (warnings) warnings->push_back(at_line(line) + "missing domain, defaulting to 000");
  } else {
    throw InputError(at_line(line) + "missing key 'domain'");
  }

  if (candidate_required || obj.contains("candidate")) {
    r.candidate = require_string(obj, "candidate", line);
  }

  auto refs = obj.find("references");
  if (refs == obj.end()) throw InputError(at_line(line) + "missing key 'references'");
  if (!refs->is_array()) throw InputError(at_line(line) + "'references' must be an array");
  if (refs->empty()) throw InputError(at_line(line) + "zero references");
  if (refs->size() > kMaxReferences) {
    throw InputError(at_line(line) + "more than " + std::to_string(kMaxReferences) + " references");
  }
  for (const auto& ref : *refs) {
    if (!ref.is_string()) throw InputError(at_line(line) + "references must be strings");
    r.references.push_back(ref.get<std::string>());
  }

  if (warnings) {
    for (const auto& [key, value] : obj.items()) {
      if (!kKnownKeys.contains(key)) warnings->push_back(at_line(line) + "ignoring unknown key '" + key + "'");
    }
  }
  return r;
}

Corpus finish(Task task, std::vector<EvalRecord> records, const std::vector<std::size_t>& lines) {
  std::unordered_map<std::string, std::size_t> first_line;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = first_line.emplace(records[i].id, lines[i]);
    if (!inserted) {
      throw InputError(at_line(lines[i]) + "duplicate id '" + records[i].id + "' (first seen on line " +
                       std::to_string(it->second) + ")");
    }
  }
  return Corpus(task, std::move(records));
}

}  // namespace

Corpus parse_corpus(std::istream& in, Task task, std::vector<std::string>* warnings) {
  LineReader reader{in};
  std::vector<EvalRecord> records;
  std::vector<std::size_t> lines;
  json obj;
  while (reader.next(obj)) {
    records.push_back(parse_record(obj, task, reader.line, true, warnings));
    lines.push_back(reader.line);
  }
  return finish(task, std::move(records), lines);
}

Corpus parse_split_corpus(std::istream& references, std::istream& candidates, Task task,
                          std::vector<std::string>* warnings) {
  LineReader ref_reader{references};
  std::vector<EvalRecord> records;
  std::vector<std::size_t> lines;
  json obj;
  while (ref_reader.next(obj)) {
    records.push_back(parse_record(obj, task, ref_reader.line, false, warnings));
    lines.push_back(ref_reader.line);
  }

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < records.size(); ++i) index.emplace(records[i].id, i);

  std::vector<bool> filled(records.size(), false);
  LineReader cand_reader{candidates};
  while (cand_reader.next(obj)) {
    const auto id = require_string(obj, "id", cand_reader.line);
    auto it = index.find(id);
    if (it == index.end()) {
      throw InputError("candidates " + at_line(cand_reader.line) + "id '" + id + "' has no references");
    }
    if (filled[it->second]) {
      throw InputError("candidates " + at_line(cand_reader.line) + "duplicate id '" + id + "'");
    }
    records[it->second].candidate = require_string(obj, "candidate", cand_reader.line);
    filled[it->second] = true;
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!filled[i]) throw InputError("no candidate for id '" + records[i].id + "'");
  }
  return finish(task, std::move(records), lines);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& r : corpus.records()) {
    json obj;
    obj["id"] = r.id;
    obj["task"] = to_string(r.task);
    obj["sub_category"] = to_string(r.sub_category);
    obj["domain"] = r.domain.to_string();
    obj["candidate"] = r.candidate;
    obj["references"] = r.references;
    out << obj.dump() << '\n';
  }
}

std::vector<RecordGroup> group_by(const Corpus& corpus, GroupKey key) {
  std::vector<RecordGroup> groups;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& r = corpus[i];
    std::string label;
    switch (key) {
      case GroupKey::SubCategory:
        label = to_string(r.sub_category);
        break;
      case GroupKey::Domain:
        label = r.domain.to_string();
        break;
      case GroupKey::SubCategoryDomain:
        label = std::string(to_string(r.sub_category)) + "/" + r.domain.to_string();
        break;
    }
    auto [it, inserted] = slot.emplace(label, groups.size());
    if (inserted) groups.push_back({std::move(label), {}});
    groups[it->second].indices.push_back(i);
  }
  return groups;
}

}  // namespace datekit
