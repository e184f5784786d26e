#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "datekit/baseline.hpp"
#include "datekit/corpus.hpp"

namespace datekit {

enum class QualityTier { Right, Safe, Wrong };

std::string_view to_string(QualityTier tier);

inline constexpr std::string_view kSpeechSafeTemplate = "A man is speaking";
inline constexpr std::string_view kGenericSafeTemplate = "Sounds are heard";
inline constexpr std::uint64_t kDefaultTierSeed = 42;

/// "A man is speaking" when every record is a speech caption or pure speech
/// audio, else "Sounds are heard".
std::string default_safe_template(const Corpus& corpus);

/// Uniform random derangement of 0..n-1: Fisher-Yates over std::mt19937_64
/// seeded with `seed` (index j for position i drawn by rejection sampling of
/// raw 64-bit outputs below the largest multiple of i+1), restarting from the
/// identity until no fixed point remains. Throws InputError for n < 2.
std::vector<std::size_t> seeded_derangement(std::size_t n, std::uint64_t seed);

/// Candidate sets of graded quality over the same references. Every tier
/// scores against the record's references minus variant 2:
///   Right - reference variant 2 of the record (a held-out paraphrase),
///   Safe  - `safe_template` for every record,
///   Wrong - reference variant 1 of another record, by seeded derangement.
/// Requires N >= 2 and at least two references per record.
std::map<QualityTier, Corpus> build_tier_corpora(const Corpus& base, std::string_view safe_template,
                                                 std::uint64_t seed = kDefaultTierSeed);

/// Right-continuous empirical CDF.
class CdfCurve {
 public:
  /// Throws InputError on an empty list.
  explicit CdfCurve(std::vector<double> scores);

  const std::vector<double>& sorted() const { return sorted_; }
  /// Distinct sample values and F at each of them.
  const std::vector<double>& points() const { return points_; }
  const std::vector<double>& fractions() const { return fractions_; }

  /// Fraction of scores <= x.
  double operator()(double x) const;

 private:
  std::vector<double> sorted_;
  std::vector<double> points_;
  std::vector<double> fractions_;
};

inline CdfCurve empirical_cdf(std::vector<double> scores) { return CdfCurve(std::move(scores)); }

/// Middle value; mean of the central pair for even sizes.
double median(std::vector<double> values);

/// |median(a) - median(b)| on the x100 scale.
double median_span(std::span<const double> a, std::span<const double> b);

struct MetricDiscrimination {
  MetricId metric = MetricId::Date;
  double median_right = 0, median_safe = 0, median_wrong = 0;  // x100
  double span_right_wrong = 0, span_right_safe = 0;
  bool right_above_safe = false;
  bool safe_above_wrong = false;
  bool ordered = false;  // median(Right) > median(Safe) > median(Wrong)
  std::map<QualityTier, CdfCurve> cdfs;
};

using TierScores = std::map<MetricId, std::map<QualityTier, std::vector<double>>>;

/// Throws InputError when a metric lacks one of the three tiers.
std::vector<MetricDiscrimination> discrimination_report(const TierScores& tier_scores);

/// "metric,tier,x,F" rows for external plotting.
void write_cdf_csv(std::ostream& out, std::span<const MetricDiscrimination> report);

}  // namespace datekit
