#pragma once

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rtbopt/metrics.hpp"
#include "rtbopt/records.hpp"

namespace rtbopt {

/// Weights on the six metrics, stored as numerators over a common
/// denominator. Grid points keep their integer composition as numerators so
/// that rank scores on the grid carry no rounding from 1/M.
class WeightVector
{
public:
  /// Uniform weights.
  WeightVector();

  /// Throws ValidationError ("invalid weights") unless every weight lies in
  /// [0,1] and the sum is 1 within 1e-9.
  static WeightVector from_weights(std::array<double, kMetricCount> const &weights);

  /// parts[k] / total. Parts must be non-negative and sum to total.
  static WeightVector from_composition(std::array<int, kMetricCount> const &parts, int total);

  static WeightVector unit(Metric m);

  double weight(std::size_t k) const
  {
    return numerators_[k] / denominator_;
  }

  std::array<double, kMetricCount> weights() const;

  std::array<double, kMetricCount> const &numerators() const
  {
    return numerators_;
  }

  double denominator() const
  {
    return denominator_;
  }

  bool operator==(WeightVector const &) const = default;

private:
  WeightVector(std::array<double, kMetricCount> const &numerators, double denominator);

  std::array<double, kMetricCount> numerators_;
  double                           denominator_;
};

/// rs = sum_k w_k x_k, accumulated in metric order.
inline double rank_score(WeightVector const &w, std::span<double const, kMetricCount> x)
{
  auto const &n = w.numerators();
  double      s = 0.0;
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    s += n[k] * x[k];
  }
  return s / w.denominator();
}

enum class NormalizationScope
{
  PerAuction,
  PerDataset,
};

/// Stage I and metric assembly applied to one auction. Candidates are
/// ordered by bid descending, then id ascending, so index 0 is always the
/// baseline (highest bid) winner and a first-maximum scan realizes the
/// rank score -> bid -> id tie-break.
struct PreparedAuction
{
  std::string               auction_id;
  std::vector<std::string>  ids;
  std::vector<double>       bids;
  std::vector<double>       payments;
  std::vector<MetricVector> metrics;

  std::size_t size() const
  {
    return ids.size();
  }
};

PreparedAuction prepare_auction(AuctionRecord const &auction, double reserve = 0.0);

/// PerDataset scales each metric by its minimum and maximum over every
/// candidate of every auction passed in.
std::vector<PreparedAuction> prepare_dataset(std::span<AuctionRecord const> dataset,
                                             double                         reserve = 0.0,
                                             NormalizationScope scope = NormalizationScope::PerAuction);

struct Selection
{
  std::string  auction_id;
  std::string  winner;
  double       rank_score = 0.0;
  MetricVector metric_vector{};
  double       payment = 0.0;
};

/// Index of the rank-score maximum (first wins, given the candidate order).
std::size_t select_index(WeightVector const &w, PreparedAuction const &auction);

Selection select_winner(WeightVector const &w, PreparedAuction const &auction);

/// Map-keyed form. Errors: empty maps ("empty auction"), differing key sets
/// ("inconsistent candidates").
Selection select_winner(WeightVector const &w, std::map<std::string, MetricVector> const &vectors,
                        std::map<std::string, double> const &bids,
                        std::map<std::string, double> const &payments = {});

/// Baseline winner with its uniform-weight rank score.
Selection baseline_selection(PreparedAuction const &auction);

/// Re-ranks with the given weights, or falls back to the baseline winner
/// when the optimizer found no admissible weights.
Selection select_with_fallback(std::optional<WeightVector> const &maybe_w,
                               PreparedAuction const             &auction);

}  // namespace rtbopt
