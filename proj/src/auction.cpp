#include "rtbopt/auction.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

#include "rtbopt/error.hpp"

namespace rtbopt {

namespace {

void check_bids(std::span<Bid const> bids)
{
  if (bids.empty())
  {
    throw ValidationError("empty auction");
  }
  std::set<std::string_view> ids;
  for (auto const &b : bids)
  {
    if (!std::isfinite(b.amount) || b.amount < 0.0)
    {
      throw ValidationError("bid of '" + b.advertiser_id + "' must be finite and >= 0");
    }
    if (!ids.insert(b.advertiser_id).second)
    {
      throw ValidationError("duplicate advertiser_id '" + b.advertiser_id + "'");
    }
  }
}

}  // namespace

std::string baseline_winner(std::span<Bid const> bids)
{
  check_bids(bids);
  auto const *best = &bids.front();
  for (auto const &b : bids.subspan(1))
  {
    if (b.amount > best->amount || (b.amount == best->amount && b.advertiser_id < best->advertiser_id))
    {
      best = &b;
    }
  }
  return best->advertiser_id;
}

double counterfactual_payment(std::string_view candidate_id, std::span<Bid const> bids, double reserve)
{
  auto const it = std::find_if(bids.begin(), bids.end(),
                               [&](Bid const &b) { return b.advertiser_id == candidate_id; });
  if (it == bids.end())
  {
    throw ValidationError("unknown candidate '" + std::string(candidate_id) + "'");
  }
  double const own   = it->amount;
  double       price = reserve;
  for (auto const &b : bids)
  {
    if (&b != &*it && b.amount <= own)
    {
      price = std::max(price, b.amount);
    }
  }
  return std::min(price, own);
}

std::vector<Bid> bids_of(AuctionRecord const &auction)
{
  std::vector<Bid> bids;
  bids.reserve(auction.candidates.size());
  for (auto const &c : auction.candidates)
  {
    bids.push_back({c.advertiser_id, c.bid});
  }
  return bids;
}

StageOneResult run_stage_one(AuctionRecord const &auction, double reserve)
{
  if (!std::isfinite(reserve) || reserve < 0.0)
  {
    throw ValidationError("reserve must be finite and >= 0");
  }
  auto const bids = bids_of(auction);

  StageOneResult result;
  result.auction_id      = auction.auction_id;
  result.baseline_winner = baseline_winner(bids);
  for (auto const &b : bids)
  {
    CandidateOutcome out;
    out.value   = b.amount;
    out.payment = counterfactual_payment(b.advertiser_id, bids, reserve);
    out.utility = out.value - out.payment;
    result.per_candidate.emplace(b.advertiser_id, out);
  }
  return result;
}

std::string to_json(StageOneResult const &result)
{
  nlohmann::ordered_json j;
  j["auction_id"]      = result.auction_id;
  j["baseline_winner"] = result.baseline_winner;
  auto &per            = j["per_candidate"];
  per                  = nlohmann::ordered_json::object();
  for (auto const &[id, out] : result.per_candidate)
  {
    per[id] = {{"payment", out.payment}, {"value", out.value}, {"utility", out.utility}};
  }
  return j.dump();
}

}  // namespace rtbopt
