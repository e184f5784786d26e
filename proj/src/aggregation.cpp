#include "datekit/aggregation.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "datekit/error.hpp"

namespace datekit {

std::string_view to_string(DomainGroup group) {
  switch (group) {
    case DomainGroup::Pure:
      return "pure";
    case DomainGroup::Mixed:
      return "mixed";
    case DomainGroup::All:
      break;
  }
  return "all";
}

std::string to_string(const CellKey& key) {
  std::string out(to_string(key.sub_category));
  if (key.group != DomainGroup::All) out += "/" + std::string(to_string(key.group));
  return out;
}

namespace {

bool is_content_specific(const SubCategory& sub) {
  const auto* cap = std::get_if<CaptionSubCategory>(&sub);
  return cap && category_of(*cap) == CaptionCategory::ContentSpecific;
}

CellKey key(CaptionSubCategory sub, DomainGroup group = DomainGroup::All) { return {sub, group}; }

}  // namespace

std::vector<CellKey> required_cells(Task task) {
  if (task == Task::QA) {
    std::vector<CellKey> out;
    for (auto sub : kQaSubCategories) out.push_back({sub, DomainGroup::All});
    return out;
  }
  using C = CaptionSubCategory;
  return {key(C::Long),
          key(C::Short),
          key(C::Speech, DomainGroup::Pure),
          key(C::Speech, DomainGroup::Mixed),
          key(C::Music, DomainGroup::Pure),
          key(C::Music, DomainGroup::Mixed),
          key(C::Sound, DomainGroup::Pure),
          key(C::Sound, DomainGroup::Mixed),
          key(C::Environment)};
}

CellTable per_cell_scores(std::span<const EvalRecord> records, std::span<const double> scores) {
  if (records.size() != scores.size()) throw InputError("every sample score must join to a record");
  CellTable table;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    CellKey cell{r.sub_category, DomainGroup::All};
    if (is_content_specific(r.sub_category)) {
      const auto pure = corresponding_pure_domain(std::get<CaptionSubCategory>(r.sub_category));
      if (r.domain.is_mixed()) {
        cell.group = DomainGroup::Mixed;
      } else if (pure && r.domain == *pure) {
        cell.group = DomainGroup::Pure;
      } else {
        table.excluded_ids.push_back(r.id);
        continue;
      }
    }
    auto& stat = table.cells[cell];
    stat.sum += scores[i] * 100.0;
    ++stat.count;
  }
  if (!records.empty()) {
    for (const auto& k : required_cells(records.front().task)) {
      if (!table.cells.contains(k)) table.empty_cells.push_back(k);
    }
  }
  return table;
}

namespace {

// Convex combinations are written relative to the first term, e.g.
// 0.8 a + 0.2 b as a + 0.2 (b - a). Equal in exact arithmetic, but a constant
// input then comes back bit-for-bit, which the plain weighted sum does not
// guarantee in floating point.
double systemic(double s_long, double s_short) { return s_long + 0.2 * (s_short - s_long); }

double content_specific(double speech, double music, double sound) {
  return speech + 0.3 * (music - speech) + 0.1 * (sound - speech);
}

double overall_caption(double sys, double content, double env) {
  return sys + 0.4 * (content - sys) + 0.2 * (env - sys);
}

}  // namespace

CaptionBreakdown score_caption(const CaptionLeafScores& leaves) {
  CaptionBreakdown b;
  b.leaves = leaves;
  b.s_speech = (leaves.s_speech_pure + leaves.s_speech_mixed) / 2.0;
  b.s_music = (leaves.s_music_pure + leaves.s_music_mixed) / 2.0;
  b.s_sound = (leaves.s_sound_pure + leaves.s_sound_mixed) / 2.0;
  b.s_systemic = systemic(leaves.s_long, leaves.s_short);
  b.s_content_specific = content_specific(b.s_speech, b.s_music, b.s_sound);
  b.score_cap = overall_caption(b.s_systemic, b.s_content_specific, leaves.s_env);
  return b;
}

CaptionBreakdown score_caption(const CellTable& table, AggConvention convention) {
  std::vector<std::string> missing;
  for (const auto& k : required_cells(Task::Caption)) {
    auto it = table.cells.find(k);
    if (it == table.cells.end() || it->second.count == 0) missing.push_back(to_string(k));
  }
  if (!missing.empty()) {
    std::string msg = "missing caption cells:";
    for (const auto& m : missing) msg += " " + m;
    throw InputError(msg);
  }
  using C = CaptionSubCategory;
  auto cell = [&](C sub, DomainGroup g = DomainGroup::All) -> const CellStat& { return table.cells.at(key(sub, g)); };

  CaptionLeafScores leaves;
  leaves.s_long = cell(C::Long).mean();
  leaves.s_short = cell(C::Short).mean();
  leaves.s_speech_pure = cell(C::Speech, DomainGroup::Pure).mean();
  leaves.s_speech_mixed = cell(C::Speech, DomainGroup::Mixed).mean();
  leaves.s_music_pure = cell(C::Music, DomainGroup::Pure).mean();
  leaves.s_music_mixed = cell(C::Music, DomainGroup::Mixed).mean();
  leaves.s_sound_pure = cell(C::Sound, DomainGroup::Pure).mean();
  leaves.s_sound_mixed = cell(C::Sound, DomainGroup::Mixed).mean();
  leaves.s_env = cell(C::Environment).mean();

  auto b = score_caption(leaves);
  if (convention == AggConvention::SampleMean) {
    auto pooled = [&](C sub) {
      const auto& p = cell(sub, DomainGroup::Pure);
      const auto& m = cell(sub, DomainGroup::Mixed);
      return (p.sum + m.sum) / static_cast<double>(p.count + m.count);
    };
    b.s_speech = pooled(C::Speech);
    b.s_music = pooled(C::Music);
    b.s_sound = pooled(C::Sound);
    b.s_content_specific = content_specific(b.s_speech, b.s_music, b.s_sound);
    b.score_cap = overall_caption(b.s_systemic, b.s_content_specific, leaves.s_env);
  }
  return b;
}

QaBreakdown score_qa(const std::array<double, 6>& v) {
  QaBreakdown b{v[0], v[1], v[2], v[3], v[4], v[5], 0.0};
  double spread = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) spread += v[i] - v[0];
  b.score_qa = v[0] + spread / 6.0;
  return b;
}

QaBreakdown score_qa(const CellTable& table) {
  std::array<double, 6> values{};
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < kQaSubCategories.size(); ++i) {
    auto it = table.cells.find({kQaSubCategories[i], DomainGroup::All});
    if (it == table.cells.end() || it->second.count == 0) {
      missing.emplace_back(to_string(SubCategory{kQaSubCategories[i]}));
    } else {
      values[i] = it->second.mean();
    }
  }
  if (!missing.empty()) {
    std::string msg = "missing QA cells:";
    for (const auto& m : missing) msg += " " + m;
    throw InputError(msg);
  }
  return score_qa(values);
}

namespace {

void row(std::ostream& out, const std::vector<std::string>& cols, std::size_t width) {
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i == 0) {
      out << std::left << std::setw(static_cast<int>(width)) << cols[i];
    } else {
      out << ' ' << std::right << std::setw(9) << cols[i];
    }
  }
  out << '\n';
}

std::string fixed1(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << v;
  return s.str();
}

}  // namespace

void render_caption_table(std::ostream& out, const std::string& label, const CaptionBreakdown& b) {
  const std::size_t width = std::max<std::size_t>(label.size(), 8);
  const auto& l = b.leaves;
  row(out, {"", "Long", "Short", "Speech/P", "Speech/M", "Music/P", "Music/M", "Sound/P", "Sound/M", "Env", "Score"},
      width);
  row(out,
      {label, fixed1(l.s_long), fixed1(l.s_short), fixed1(l.s_speech_pure), fixed1(l.s_speech_mixed),
       fixed1(l.s_music_pure), fixed1(l.s_music_mixed), fixed1(l.s_sound_pure), fixed1(l.s_sound_mixed),
       fixed1(l.s_env), fixed1(b.score_cap)},
      width);
}

void render_qa_table(std::ostream& out, const std::string& label, const QaBreakdown& b) {
  const std::size_t width = std::max<std::size_t>(label.size(), 8);
  row(out, {"", "DP", "SC", "QAS", "ER", "IJ", "AC", "Score"}, width);
  row(out,
      {label, fixed1(b.s_dp), fixed1(b.s_sc), fixed1(b.s_qas), fixed1(b.s_er), fixed1(b.s_ij), fixed1(b.s_ac),
       fixed1(b.score_qa)},
      width);
}

}  // namespace datekit
