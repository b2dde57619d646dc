#pragma once

#include <string>
#include <variant>
#include <vector>

namespace rtbopt {

/// Page/ad text for the built-in relevance scorer.
struct TextPair
{
  std::string page_text;
  std::string ad_text;

  bool operator==(TextPair const &) const = default;
};

/// Per-candidate inputs that do not come from the auction itself. The
/// memorability, relevance and saliency scores are produced by external
/// models and enter here as plain numbers.
struct RawMetrics
{
  double memorability = 0.0;
  double ctr          = 0.0;
  std::variant<double, TextPair> relevance = 0.0;
  double saliency     = 0.0;

  bool operator==(RawMetrics const &) const = default;
};

struct Candidate
{
  std::string advertiser_id;
  double      bid = 0.0;
  RawMetrics  raw;

  bool operator==(Candidate const &) const = default;
};

/// One auction z: the advertisers competing for a single impression.
struct AuctionRecord
{
  std::string            auction_id;
  std::vector<Candidate> candidates;

  bool operator==(AuctionRecord const &) const = default;
};

/// Throws ValidationError unless the record has at least one candidate,
/// unique advertiser ids, finite non-negative bids, ctr in [0,1], finite
/// scores and a non-negative saliency ratio.
void validate_record(AuctionRecord const &record);

}  // namespace rtbopt
