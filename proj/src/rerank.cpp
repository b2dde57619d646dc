#include "rtbopt/rerank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rtbopt/auction.hpp"
#include "rtbopt/error.hpp"

namespace rtbopt {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

}  // namespace

WeightVector::WeightVector()
    : WeightVector([] {
        std::array<double, kMetricCount> ones;
        ones.fill(1.0);
        return ones;
      }(),
                   static_cast<double>(kMetricCount))
{}

WeightVector::WeightVector(std::array<double, kMetricCount> const &numerators, double denominator)
    : numerators_(numerators)
    , denominator_(denominator)
{}

WeightVector WeightVector::from_weights(std::array<double, kMetricCount> const &weights)
{
  double sum = 0.0;
  for (double const w : weights)
  {
    if (!std::isfinite(w) || w < 0.0 || w > 1.0)
    {
      throw ValidationError("invalid weights: every weight must lie in [0,1]");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance)
  {
    throw ValidationError("invalid weights: weights must sum to 1");
  }
  return WeightVector(weights, 1.0);
}

WeightVector WeightVector::from_composition(std::array<int, kMetricCount> const &parts, int total)
{
  if (total < 1)
  {
    throw ValidationError("invalid weights: composition total must be >= 1");
  }
  std::array<double, kMetricCount> numerators{};
  int                              sum = 0;
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    if (parts[k] < 0)
    {
      throw ValidationError("invalid weights: negative composition part");
    }
    sum += parts[k];
    numerators[k] = parts[k];
  }
  if (sum != total)
  {
    throw ValidationError("invalid weights: composition does not sum to its total");
  }
  return WeightVector(numerators, total);
}

WeightVector WeightVector::unit(Metric m)
{
  std::array<int, kMetricCount> parts{};
  parts[index_of(m)] = 1;
  return from_composition(parts, 1);
}

std::array<double, kMetricCount> WeightVector::weights() const
{
  std::array<double, kMetricCount> w{};
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    w[k] = weight(k);
  }
  return w;
}

namespace {

/// Candidate order shared by every Stage II routine.
std::vector<std::size_t> candidate_order(std::vector<std::string> const &ids, std::vector<double> const &bids)
{
  std::vector<std::size_t> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (bids[a] != bids[b])
    {
      return bids[a] > bids[b];
    }
    return ids[a] < ids[b];
  });
  return order;
}

template <typename T>
std::vector<T> permute(std::vector<T> const &values, std::vector<std::size_t> const &order)
{
  std::vector<T> out;
  out.reserve(order.size());
  for (auto const i : order)
  {
    out.push_back(values[i]);
  }
  return out;
}

/// Unordered, un-normalized candidate data of one auction.
PreparedAuction raw_auction(AuctionRecord const &auction, double reserve)
{
  validate_record(auction);
  auto const stage_one = run_stage_one(auction, reserve);
  auto const raw       = raw_metric_values(auction, stage_one);

  PreparedAuction p;
  p.auction_id = auction.auction_id;
  for (auto const &c : auction.candidates)
  {
    p.ids.push_back(c.advertiser_id);
    p.bids.push_back(c.bid);
    p.payments.push_back(stage_one.per_candidate.at(c.advertiser_id).payment);
    p.metrics.push_back(raw.at(c.advertiser_id));
  }
  return p;
}

void sort_candidates(PreparedAuction &p)
{
  auto const order = candidate_order(p.ids, p.bids);
  p.ids            = permute(p.ids, order);
  p.bids           = permute(p.bids, order);
  p.payments       = permute(p.payments, order);
  p.metrics        = permute(p.metrics, order);
}

}  // namespace

PreparedAuction prepare_auction(AuctionRecord const &auction, double reserve)
{
  auto p = raw_auction(auction, reserve);

  std::vector<double> column(p.size());
  for (std::size_t k = 0; k < kMetricCount; ++k)
  {
    for (std::size_t i = 0; i < p.size(); ++i)
    {
      column[i] = p.metrics[i][k];
    }
    auto const scaled = normalize_per_auction(column);
    for (std::size_t i = 0; i < p.size(); ++i)
    {
      p.metrics[i][k] = scaled[i];
    }
  }
  sort_candidates(p);
  return p;
}

std::vector<PreparedAuction> prepare_dataset(std::span<AuctionRecord const> dataset, double reserve,
                                             NormalizationScope scope)
{
  std::vector<PreparedAuction> out;
  out.reserve(dataset.size());
  if (scope == NormalizationScope::PerAuction)
  {
    for (auto const &a : dataset)
    {
      out.push_back(prepare_auction(a, reserve));
    }
    return out;
  }

  for (auto const &a : dataset)
  {
    out.push_back(raw_auction(a, reserve));
  }
  MetricVector lo;
  MetricVector hi;
  lo.fill(INFINITY);
  hi.fill(-INFINITY);
  for (auto const &p : out)
  {
    for (auto const &v : p.metrics)
    {
      for (std::size_t k = 0; k < kMetricCount; ++k)
      {
        lo[k] = std::min(lo[k], v[k]);
        hi[k] = std::max(hi[k], v[k]);
      }
    }
  }
  for (auto &p : out)
  {
    for (auto &v : p.metrics)
    {
      for (std::size_t k = 0; k < kMetricCount; ++k)
      {
        double const range = hi[k] - lo[k];
        v[k]               = range > 0.0 ? std::clamp((v[k] - lo[k]) / range, 0.0, 1.0) : 0.5;
      }
    }
    sort_candidates(p);
  }
  return out;
}

std::size_t select_index(WeightVector const &w, PreparedAuction const &auction)
{
  if (auction.size() == 0)
  {
    throw ValidationError("empty auction");
  }
  std::size_t best       = 0;
  double      best_score = rank_score(w, auction.metrics[0]);
  for (std::size_t i = 1; i < auction.size(); ++i)
  {
    double const s = rank_score(w, auction.metrics[i]);
    if (s > best_score)
    {
      best       = i;
      best_score = s;
    }
  }
  return best;
}

namespace {

Selection selection_at(PreparedAuction const &auction, std::size_t i, double score)
{
  return Selection{auction.auction_id, auction.ids[i], score, auction.metrics[i], auction.payments[i]};
}

}  // namespace

Selection select_winner(WeightVector const &w, PreparedAuction const &auction)
{
  auto const i = select_index(w, auction);
  return selection_at(auction, i, rank_score(w, auction.metrics[i]));
}

Selection select_winner(WeightVector const &w, std::map<std::string, MetricVector> const &vectors,
                        std::map<std::string, double> const &bids, std::map<std::string, double> const &payments)
{
  if (vectors.empty() || bids.empty())
  {
    throw ValidationError("empty auction");
  }
  if (vectors.size() != bids.size() ||
      !std::equal(vectors.begin(), vectors.end(), bids.begin(),
                  [](auto const &a, auto const &b) { return a.first == b.first; }))
  {
    throw ValidationError("inconsistent candidates");
  }

  PreparedAuction p;
  for (auto const &[id, v] : vectors)
  {
    p.ids.push_back(id);
    p.bids.push_back(bids.at(id));
    auto const pay = payments.find(id);
    p.payments.push_back(pay == payments.end() ? 0.0 : pay->second);
    p.metrics.push_back(v);
  }
  sort_candidates(p);
  return select_winner(w, p);
}

Selection baseline_selection(PreparedAuction const &auction)
{
  if (auction.size() == 0)
  {
    throw ValidationError("empty auction");
  }
  return selection_at(auction, 0, rank_score(WeightVector{}, auction.metrics[0]));
}

Selection select_with_fallback(std::optional<WeightVector> const &maybe_w, PreparedAuction const &auction)
{
  if (!maybe_w)
  {
    return baseline_selection(auction);
  }
  return select_winner(*maybe_w, auction);
}

}  // namespace rtbopt
