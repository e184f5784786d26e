#include "datekit/domain.hpp"

#include "datekit/error.hpp"

namespace datekit {

std::string_view to_string(Task task) { return task == Task::Caption ? "caption" : "qa"; }

std::optional<Task> parse_task(std::string_view text) {
  if (text == "caption") return Task::Caption;
  if (text == "qa") return Task::QA;
  return std::nullopt;
}

std::optional<DomainCode> DomainCode::parse(std::string_view text) {
  if (text.size() != 3) return std::nullopt;
  std::uint8_t mask = 0;
  constexpr std::array<std::pair<char, std::uint8_t>, 3> slots{{{'S', kSpeech}, {'M', kMusic}, {'A', kSound}}};
  for (std::size_t i = 0; i < 3; ++i) {
    if (text[i] == slots[i].first) {
      mask |= slots[i].second;
    } else if (text[i] != '0') {
      return std::nullopt;
    }
  }
  return DomainCode(mask);
}

DomainCode DomainCode::from_string(std::string_view text) {
  if (auto code = parse(text)) return *code;
  throw InputError("unknown domain code '" + std::string(text) + "'");
}

const std::array<DomainCode, 8>& DomainCode::all() {
  // Pure domains first, then the mixed ones, in the order used by reports.
  static const std::array<DomainCode, 8> codes{
      DomainCode(0),      DomainCode(kSpeech), DomainCode(kMusic), DomainCode(kSound),
      DomainCode(kSpeech | kMusic), DomainCode(kSpeech | kSound), DomainCode(kMusic | kSound),
      DomainCode(kSpeech | kMusic | kSound)};
  return codes;
}

std::string DomainCode::to_string() const {
  std::string out(3, '0');
  if (contains_speech()) out[0] = 'S';
  if (contains_music()) out[1] = 'M';
  if (contains_sound()) out[2] = 'A';
  return out;
}

CaptionCategory category_of(CaptionSubCategory sub) {
  switch (sub) {
    case CaptionSubCategory::Long:
    case CaptionSubCategory::Short:
      return CaptionCategory::Systemic;
    case CaptionSubCategory::Speech:
    case CaptionSubCategory::Music:
    case CaptionSubCategory::Sound:
      return CaptionCategory::ContentSpecific;
    case CaptionSubCategory::Environment:
      break;
  }
  return CaptionCategory::ContentUnrelated;
}

QaCategory category_of(QaSubCategory sub) {
  switch (sub) {
    case QaSubCategory::DP:
      return QaCategory::Perception;
    case QaSubCategory::SC:
    case QaSubCategory::QAS:
      return QaCategory::Analysis;
    default:
      return QaCategory::Reasoning;
  }
}

Task task_of(const SubCategory& sub) {
  return std::holds_alternative<CaptionSubCategory>(sub) ? Task::Caption : Task::QA;
}

namespace {

constexpr std::array<std::string_view, 6> kCaptionNames{"long",  "short", "speech",
                                                        "music", "sound", "environment"};
constexpr std::array<std::string_view, 6> kQaNames{"dp", "sc", "qas", "er", "ij", "ac"};

}  // namespace

std::string_view to_string(const SubCategory& sub) {
  if (const auto* cap = std::get_if<CaptionSubCategory>(&sub)) {
    return kCaptionNames[static_cast<std::size_t>(*cap)];
  }
  return kQaNames[static_cast<std::size_t>(std::get<QaSubCategory>(sub))];
}

std::optional<SubCategory> parse_sub_category(std::string_view text) {
  for (std::size_t i = 0; i < kCaptionNames.size(); ++i) {
    if (kCaptionNames[i] == text) return SubCategory{static_cast<CaptionSubCategory>(i)};
  }
  for (std::size_t i = 0; i < kQaNames.size(); ++i) {
    if (kQaNames[i] == text) return SubCategory{static_cast<QaSubCategory>(i)};
  }
  return std::nullopt;
}

std::optional<DomainCode> corresponding_pure_domain(CaptionSubCategory sub) {
  switch (sub) {
    case CaptionSubCategory::Speech:
      return DomainCode::from_string("S00");
    case CaptionSubCategory::Music:
      return DomainCode::from_string("0M0");
    case CaptionSubCategory::Sound:
      return DomainCode::from_string("00A");
    default:
      return std::nullopt;
  }
}

}  // namespace datekit
