#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "datekit/corpus.hpp"

namespace datekit {

/// Content-specific caption sub-categories split into pure and mixed cells;
/// every other sub-category is a single All cell.
enum class DomainGroup { All, Pure, Mixed };

std::string_view to_string(DomainGroup group);

struct CellKey {
  SubCategory sub_category;
  DomainGroup group = DomainGroup::All;

  friend bool operator==(const CellKey&, const CellKey&) = default;
  friend bool operator<(const CellKey& a, const CellKey& b) {
    if (a.sub_category != b.sub_category) return a.sub_category < b.sub_category;
    return a.group < b.group;
  }
};

std::string to_string(const CellKey& key);

/// Scores on the 0-100 scale.
struct CellStat {
  double sum = 0.0;
  std::size_t count = 0;
  double mean() const { return count == 0 ? 0.0 : sum / static_cast<double>(count); }
};

struct CellTable {
  std::map<CellKey, CellStat> cells;
  /// Expected leaf cells that received no samples.
  std::vector<CellKey> empty_cells;
  /// Records that belong to no cell, e.g. a speech caption on pure music audio.
  std::vector<std::string> excluded_ids;
};

/// The leaf cells a task's breakdown needs (9 for captions, 6 for QA).
std::vector<CellKey> required_cells(Task task);

/// Means x100 per (sub-category, domain group). Speech/Music/Sound records go
/// to Pure when their domain is the matching pure domain (S00/0M0/00A), to
/// Mixed for any mixed domain, and are excluded otherwise.
/// `scores` are on [0, 1] and align with `records`.
CellTable per_cell_scores(std::span<const EvalRecord> records, std::span<const double> scores);

/// How each content type combines its pure and mixed results.
enum class AggConvention {
  CellMean,    // unweighted mean of the two cell means
  SampleMean,  // mean over every sample of both cells
};

struct CaptionLeafScores {
  double s_long = 0, s_short = 0;
  double s_speech_pure = 0, s_speech_mixed = 0;
  double s_music_pure = 0, s_music_mixed = 0;
  double s_sound_pure = 0, s_sound_mixed = 0;
  double s_env = 0;
};

struct CaptionBreakdown {
  CaptionLeafScores leaves;
  double s_speech = 0, s_music = 0, s_sound = 0;
  double s_systemic = 0, s_content_specific = 0;
  double score_cap = 0;
};

struct QaBreakdown {
  double s_dp = 0, s_sc = 0, s_qas = 0, s_er = 0, s_ij = 0, s_ac = 0;
  double score_qa = 0;
};

/// Cell-mean convention over already aggregated leaves.
CaptionBreakdown score_caption(const CaptionLeafScores& leaves);

/// Throws InputError listing every missing leaf cell.
CaptionBreakdown score_caption(const CellTable& table, AggConvention convention = AggConvention::CellMean);

QaBreakdown score_qa(const std::array<double, 6>& dp_sc_qas_er_ij_ac);
QaBreakdown score_qa(const CellTable& table);

/// Aligned tables in the benchmark's column order, one decimal.
void render_caption_table(std::ostream& out, const std::string& label, const CaptionBreakdown& b);
void render_qa_table(std::ostream& out, const std::string& label, const QaBreakdown& b);

}  // namespace datekit
