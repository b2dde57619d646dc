#include "rtbopt/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <unordered_map>

#include "rtbopt/error.hpp"

namespace rtbopt {

std::vector<double> normalize_per_auction(std::span<double const> values)
{
  if (values.empty())
  {
    throw ValidationError("cannot normalize an empty list");
  }
  for (std::size_t i = 0; i < values.size(); ++i)
  {
    if (!std::isfinite(values[i]))
    {
      throw ValidationError("invalid metric value at position " + std::to_string(i));
    }
  }
  auto const [lo, hi] = std::minmax_element(values.begin(), values.end());
  double const min    = *lo;
  double const range  = *hi - *lo;

  std::vector<double> out(values.size(), 0.5);
  if (range > 0.0)
  {
    for (std::size_t i = 0; i < values.size(); ++i)
    {
      out[i] = std::clamp((values[i] - min) / range, 0.0, 1.0);
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text)
{
  std::vector<std::string> tokens;
  std::string              current;
  for (char const ch : text)
  {
    auto const u = static_cast<unsigned char>(ch);
    if (std::isalnum(u))
    {
      current.push_back(static_cast<char>(std::tolower(u)));
    }
    else if (!current.empty())
    {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty())
  {
    tokens.push_back(std::move(current));
  }
  return tokens;
}

namespace {

std::unordered_map<std::string, double> term_frequencies(std::span<std::string const> tokens)
{
  std::unordered_map<std::string, double> tf;
  for (auto const &t : tokens)
  {
    std::string lower(t.size(), '\0');
    std::transform(t.begin(), t.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    tf[lower] += 1.0;
  }
  return tf;
}

double norm(std::unordered_map<std::string, double> const &tf)
{
  double s = 0.0;
  for (auto const &[term, count] : tf)
  {
    s += count * count;
  }
  return std::sqrt(s);
}

}  // namespace

double lexical_relevance(std::span<std::string const> page_tokens, std::span<std::string const> ad_tokens)
{
  if (page_tokens.empty() || ad_tokens.empty())
  {
    return 0.0;
  }
  auto const page = term_frequencies(page_tokens);
  auto const ad   = term_frequencies(ad_tokens);

  // Iterate the smaller map; the dot product is symmetric.
  auto const &small = page.size() <= ad.size() ? page : ad;
  auto const &large = page.size() <= ad.size() ? ad : page;
  double      dot   = 0.0;
  for (auto const &[term, count] : small)
  {
    if (auto const it = large.find(term); it != large.end())
    {
      dot += count * it->second;
    }
  }
  double const denom = norm(page) * norm(ad);
  if (denom == 0.0)
  {
    return 0.0;
  }
  return std::clamp(dot / denom, 0.0, 1.0);
}

double relevance_of(RawMetrics const &raw)
{
  if (auto const *score = std::get_if<double>(&raw.relevance))
  {
    return *score;
  }
  auto const &text = std::get<TextPair>(raw.relevance);
  auto const  page = tokenize(text.page_text);
  auto const  ad   = tokenize(text.ad_text);
  return lexical_relevance(page, ad);
}

std::map<std::string, MetricVector> raw_metric_values(AuctionRecord const &auction, StageOneResult const &stage_one)
{
  std::map<std::string, MetricVector> out;
  for (auto const &c : auction.candidates)
  {
    auto const it = stage_one.per_candidate.find(c.advertiser_id);
    if (it == stage_one.per_candidate.end() || c.raw.relevance.valueless_by_exception())
    {
      throw ValidationError("incomplete candidate '" + c.advertiser_id + "' in auction '" + auction.auction_id +
                            "'");
    }
    MetricVector v{};
    v[index_of(Metric::Revenue)]      = it->second.payment;
    v[index_of(Metric::Utility)]      = it->second.utility;
    v[index_of(Metric::Memorability)] = c.raw.memorability;
    v[index_of(Metric::Ctr)]          = c.raw.ctr;
    v[index_of(Metric::Relevance)]    = relevance_of(c.raw);
    v[index_of(Metric::Saliency)]     = c.raw.saliency;

    for (std::size_t k = 0; k < kMetricCount; ++k)
    {
      if (!std::isfinite(v[k]))
      {
        throw ValidationError("invalid metric value: candidate '" + c.advertiser_id + "' in auction '" +
                              auction.auction_id + "', metric " + std::string(kMetricNames[k]));
      }
    }
    if (!out.emplace(c.advertiser_id, v).second)
    {
      throw ValidationError("duplicate advertiser_id '" + c.advertiser_id + "'");
    }
  }
  if (out.size() != stage_one.per_candidate.size())
  {
    throw ValidationError("incomplete candidate set in auction '" + auction.auction_id + "'");
  }
  return out;
}

std::map<std::string, MetricVector> assemble_metric_vectors(AuctionRecord const &auction,
                                                            StageOneResult const &stage_one)
{
  auto raw = raw_metric_values(auction, stage_one);
  if (raw.empty())
  {
    throw ValidationError("empty auction");
  }

  std::vector<double> column(raw.size());
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    std::size_t i = 0;
    for (auto const &[id, v] : raw)
    {
      column[i++] = v[k];
    }
    auto const scaled = normalize_per_auction(column);
    i                 = 0;
    for (auto &[id, v] : raw)
    {
      v[k] = scaled[i++];
    }
  }
  return raw;
}

}  // namespace rtbopt
