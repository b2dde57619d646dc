#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtbopt/auction.hpp"
#include "rtbopt/records.hpp"

namespace rtbopt {

/// The six Stage II variables, in the fixed order used by every file format.
enum class Metric : std::size_t
{
  Revenue = 0,
  Utility,
  Memorability,
  Ctr,
  Relevance,
  Saliency,
};

inline constexpr std::size_t kMetricCount = 6;

inline constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "revenue", "utility", "memorability", "ctr", "relevance", "saliency"};

inline constexpr std::size_t index_of(Metric m)
{
  return static_cast<std::size_t>(m);
}

inline constexpr std::array<Metric, kMetricCount> kAllMetrics = {
    Metric::Revenue, Metric::Utility,   Metric::Memorability,
    Metric::Ctr,     Metric::Relevance, Metric::Saliency};

/// Normalized inputs x_{k,i,z} of one candidate, each in [0,1].
using MetricVector = std::array<double, kMetricCount>;

/// Min-max scaling to [0,1]. A constant input maps to 0.5 everywhere.
std::vector<double> normalize_per_auction(std::span<double const> values);

/// Lowercased alphanumeric runs; every other character separates tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Cosine similarity of term-frequency vectors. Tokens are lowercased before
/// counting; an empty side gives 0.
double lexical_relevance(std::span<std::string const> page_tokens,
                         std::span<std::string const> ad_tokens);

/// Precomputed relevance score, or the lexical score of the text pair.
double relevance_of(RawMetrics const &raw);

/// Un-normalized Stage II inputs: payment, utility, memorability, ctr,
/// relevance, saliency.
std::map<std::string, MetricVector> raw_metric_values(AuctionRecord const  &auction,
                                                      StageOneResult const &stage_one);

/// Raw values normalized across the candidates of this auction.
std::map<std::string, MetricVector> assemble_metric_vectors(AuctionRecord const  &auction,
                                                            StageOneResult const &stage_one);

}  // namespace rtbopt
