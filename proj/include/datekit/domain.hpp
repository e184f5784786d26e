#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace datekit {

enum class Task { Caption, QA };

std::string_view to_string(Task task);
std::optional<Task> parse_task(std::string_view text);

/// One of the eight audio domains. The code spells the presence of speech
/// (S), music (M) and sound events (A) in that order, '0' marking absence.
class DomainCode {
 public:
  /// Silence, "000".
  constexpr DomainCode() = default;

  static std::optional<DomainCode> parse(std::string_view text);
  /// Throws InputError on anything but the eight valid codes.
  static DomainCode from_string(std::string_view text);

  static const std::array<DomainCode, 8>& all();

  constexpr bool contains_speech() const { return (mask_ & kSpeech) != 0; }
  constexpr bool contains_music() const { return (mask_ & kMusic) != 0; }
  constexpr bool contains_sound() const { return (mask_ & kSound) != 0; }
  constexpr bool is_pure() const { return mask_ == 0 || (mask_ & (mask_ - 1)) == 0; }
  constexpr bool is_mixed() const { return !is_pure(); }

  std::string to_string() const;

  friend constexpr bool operator==(DomainCode, DomainCode) = default;
  friend constexpr auto operator<=>(DomainCode a, DomainCode b) { return a.mask_ <=> b.mask_; }

 private:
  static constexpr std::uint8_t kSpeech = 4;
  static constexpr std::uint8_t kMusic = 2;
  static constexpr std::uint8_t kSound = 1;

  constexpr explicit DomainCode(std::uint8_t mask) : mask_(mask) {}

  std::uint8_t mask_ = 0;
};

enum class CaptionSubCategory { Long, Short, Speech, Music, Sound, Environment };
enum class QaSubCategory { DP, SC, QAS, ER, IJ, AC };

enum class CaptionCategory { Systemic, ContentSpecific, ContentUnrelated };
enum class QaCategory { Perception, Analysis, Reasoning };

CaptionCategory category_of(CaptionSubCategory sub);
QaCategory category_of(QaSubCategory sub);

using SubCategory = std::variant<CaptionSubCategory, QaSubCategory>;

Task task_of(const SubCategory& sub);

/// Lower-case wire names: long, short, speech, ..., dp, sc, qas, er, ij, ac.
std::string_view to_string(const SubCategory& sub);
std::optional<SubCategory> parse_sub_category(std::string_view text);

/// For Speech, Music and Sound: the pure domain that carries that content.
std::optional<DomainCode> corresponding_pure_domain(CaptionSubCategory sub);

inline constexpr std::array<CaptionSubCategory, 6> kCaptionSubCategories{
    CaptionSubCategory::Long,  CaptionSubCategory::Short, CaptionSubCategory::Speech,
    CaptionSubCategory::Music, CaptionSubCategory::Sound, CaptionSubCategory::Environment};

inline constexpr std::array<QaSubCategory, 6> kQaSubCategories{
    QaSubCategory::DP, QaSubCategory::SC, QaSubCategory::QAS,
    QaSubCategory::ER, QaSubCategory::IJ, QaSubCategory::AC};

}  // namespace datekit
