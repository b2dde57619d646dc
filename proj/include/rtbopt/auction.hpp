#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rtbopt/records.hpp"

namespace rtbopt {

struct Bid
{
  std::string advertiser_id;
  double      amount = 0.0;
};

struct CandidateOutcome
{
  double payment = 0.0;
  double value   = 0.0;
  double utility = 0.0;

  bool operator==(CandidateOutcome const &) const = default;
};

/// Stage I output for one auction. Values equal bids (truthful bidding).
struct StageOneResult
{
  std::string                             auction_id;
  std::string                             baseline_winner;
  std::map<std::string, CandidateOutcome> per_candidate;

  bool operator==(StageOneResult const &) const = default;
};

/// Highest bid wins; equal bids go to the lexicographically smallest id.
std::string baseline_winner(std::span<Bid const> bids);

/// Price the candidate would pay as winner of a second-price auction in
/// which every strictly higher bidder is absent:
///   max({reserve} U {b_j : j != i, b_j <= b_i}), capped at b_i.
double counterfactual_payment(std::string_view candidate_id, std::span<Bid const> bids,
                              double reserve = 0.0);

StageOneResult run_stage_one(AuctionRecord const &auction, double reserve = 0.0);

std::vector<Bid> bids_of(AuctionRecord const &auction);

/// Canonical JSON text, stable across runs.
std::string to_json(StageOneResult const &result);

}  // namespace rtbopt
