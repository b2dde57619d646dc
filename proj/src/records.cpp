#include "rtbopt/records.hpp"

#include <cmath>
#include <set>

#include "rtbopt/error.hpp"

namespace rtbopt {

namespace {

void require(bool ok, AuctionRecord const &record, std::string const &what)
{
  if (!ok)
  {
    throw ValidationError("auction '" + record.auction_id + "': " + what);
  }
}

}  // namespace

void validate_record(AuctionRecord const &record)
{
  require(!record.auction_id.empty(), record, "empty auction_id");
  require(!record.candidates.empty(), record, "empty auction");

  std::set<std::string_view> seen;
  for (auto const &c : record.candidates)
  {
    auto const who = "candidate '" + c.advertiser_id + "': ";
    require(!c.advertiser_id.empty(), record, "empty advertiser_id");
    require(seen.insert(c.advertiser_id).second, record, "duplicate advertiser_id '" + c.advertiser_id + "'");
    require(std::isfinite(c.bid) && c.bid >= 0.0, record, who + "bid must be finite and >= 0");
    require(std::isfinite(c.raw.ctr) && c.raw.ctr >= 0.0 && c.raw.ctr <= 1.0, record,
            who + "ctr must lie in [0,1]");
    require(std::isfinite(c.raw.memorability), record, who + "memorability must be finite");
    require(std::isfinite(c.raw.saliency) && c.raw.saliency >= 0.0, record,
            who + "saliency must be finite and >= 0");
    if (auto const *score = std::get_if<double>(&c.raw.relevance))
    {
      require(std::isfinite(*score), record, who + "relevance must be finite");
    }
  }
}

}  // namespace rtbopt
