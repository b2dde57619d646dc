#include "rtbopt/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <boost/math/distributions/beta.hpp>

#include "json.hpp"
#include "rtbopt/error.hpp"
#include "rtbopt/numbers.hpp"

namespace rtbopt {

namespace {

[[noreturn]] void bad_config(std::string const &field, std::string const &why)
{
  throw ValidationError("invalid generator config: " + field + " " + why);
}

void check_range(UniformRange const &r, std::string const &field, bool non_negative)
{
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi)
  {
    bad_config(field, "must be a finite range with lo <= hi");
  }
  if (non_negative && r.lo < 0.0)
  {
    bad_config(field, "must be non-negative");
  }
}

std::string padded(std::string_view prefix, std::size_t value, std::size_t width)
{
  auto digits = std::to_string(value);
  if (digits.size() < width)
  {
    digits.insert(0, width - digits.size(), '0');
  }
  return std::string(prefix) + digits;
}

double standard_normal_cdf(double z)
{
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace

void GeneratorConfig::validate() const
{
  if (n_auctions < 1)
  {
    bad_config("n_auctions", "must be >= 1");
  }
  if (min_candidates < 1)
  {
    bad_config("min_candidates", "must be >= 1");
  }
  if (max_candidates < min_candidates)
  {
    bad_config("max_candidates", "must be >= min_candidates");
  }
  if (!std::isfinite(bids.p1) || !std::isfinite(bids.p2))
  {
    bad_config("bid_distribution", "parameters must be finite");
  }
  if (bids.kind == BidDistribution::Kind::Lognormal && bids.p2 <= 0.0)
  {
    bad_config("bid_distribution", "sigma must be > 0");
  }
  if (bids.kind == BidDistribution::Kind::Uniform && (bids.p1 < 0.0 || bids.p2 <= bids.p1))
  {
    bad_config("bid_distribution", "needs 0 <= lo < hi");
  }
  if (!(ctr_alpha > 0.0) || !std::isfinite(ctr_alpha))
  {
    bad_config("ctr_alpha", "must be > 0");
  }
  if (!(ctr_beta > 0.0) || !std::isfinite(ctr_beta))
  {
    bad_config("ctr_beta", "must be > 0");
  }
  check_range(memorability, "memorability", false);
  check_range(relevance, "relevance", false);
  check_range(saliency, "saliency", true);
  if (!(rho >= -1.0 && rho <= 1.0))
  {
    bad_config("rho", "must lie in [-1,1]");
  }
}

std::vector<AuctionRecord> generate_dataset(GeneratorConfig const &cfg)
{
  cfg.validate();

  std::mt19937_64                            rng(cfg.seed);
  std::normal_distribution<double>           normal(0.0, 1.0);
  std::uniform_real_distribution<double>     unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> count(cfg.min_candidates, cfg.max_candidates);
  boost::math::beta_distribution<double> const ctr_dist(cfg.ctr_alpha, cfg.ctr_beta);

  double const noise_scale = std::sqrt(std::max(0.0, 1.0 - cfg.rho * cfg.rho));
  auto const   width       = std::to_string(cfg.n_auctions).size();
  auto const   adv_width   = std::to_string(cfg.max_candidates).size();
  auto const   scaled = [&](UniformRange const &r) { return r.lo + (r.hi - r.lo) * unit(rng); };

  std::vector<AuctionRecord> out;
  out.reserve(cfg.n_auctions);
  for (std::size_t z = 0; z < cfg.n_auctions; ++z)
  {
    AuctionRecord record;
    record.auction_id = padded("auc-", z, width);
    std::size_t const n = count(rng);
    for (std::size_t i = 0; i < n; ++i)
    {
      double const bid_z = normal(rng);
      double const ctr_z = cfg.rho * bid_z + noise_scale * normal(rng);

      Candidate c;
      c.advertiser_id = padded("adv-", i, adv_width);
      if (cfg.bids.kind == BidDistribution::Kind::Lognormal)
      {
        c.bid = std::exp(cfg.bids.p1 + cfg.bids.p2 * bid_z);
      }
      else
      {
        c.bid = cfg.bids.p1 + (cfg.bids.p2 - cfg.bids.p1) * standard_normal_cdf(bid_z);
      }
      c.raw.ctr          = boost::math::quantile(ctr_dist, standard_normal_cdf(ctr_z));
      c.raw.memorability = scaled(cfg.memorability);
      c.raw.relevance    = scaled(cfg.relevance);
      c.raw.saliency     = scaled(cfg.saliency);
      record.candidates.push_back(std::move(c));
    }
    out.push_back(std::move(record));
  }
  return out;
}

DataFormat format_from_path(std::filesystem::path const &path)
{
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".csv" ? DataFormat::Csv : DataFormat::Jsonl;
}

namespace {

using json = nlohmann::json;

[[noreturn]] void schema_error(std::size_t line, std::string const &what)
{
  throw ValidationError("line " + std::to_string(line) + ": " + what);
}

double number_field(json const &obj, char const *name, std::size_t line)
{
  auto const it = obj.find(name);
  if (it == obj.end())
  {
    schema_error(line, std::string("missing field '") + name + "'");
  }
  if (!it->is_number())
  {
    schema_error(line, std::string("field '") + name + "' must be a number");
  }
  return it->get<double>();
}

std::string string_field(json const &obj, char const *name, std::size_t line)
{
  auto const it = obj.find(name);
  if (it == obj.end())
  {
    schema_error(line, std::string("missing field '") + name + "'");
  }
  if (!it->is_string())
  {
    schema_error(line, std::string("field '") + name + "' must be a string");
  }
  return it->get<std::string>();
}

void check_candidate_fields(Candidate const &c, std::size_t line)
{
  if (!std::isfinite(c.bid) || c.bid < 0.0)
  {
    schema_error(line, "field 'bid' must be finite and >= 0");
  }
  if (!(c.raw.ctr >= 0.0 && c.raw.ctr <= 1.0))
  {
    schema_error(line, "field 'ctr' must lie in [0,1]");
  }
  if (!std::isfinite(c.raw.memorability))
  {
    schema_error(line, "field 'memorability' must be finite");
  }
  if (!std::isfinite(c.raw.saliency) || c.raw.saliency < 0.0)
  {
    schema_error(line, "field 'saliency' must be finite and >= 0");
  }
  if (auto const *r = std::get_if<double>(&c.raw.relevance); r != nullptr && !std::isfinite(*r))
  {
    schema_error(line, "field 'relevance' must be finite");
  }
}

void finish_record(AuctionRecord const &record, std::set<std::string> &seen, std::size_t line)
{
  if (!seen.insert(record.auction_id).second)
  {
    schema_error(line, "duplicate auction_id '" + record.auction_id + "'");
  }
  try
  {
    validate_record(record);
  }
  catch (ValidationError const &e)
  {
    schema_error(line, e.what());
  }
}

}  // namespace

std::vector<AuctionRecord> read_jsonl(std::istream &in)
{
  std::vector<AuctionRecord> out;
  std::set<std::string>      seen;
  std::string                text;
  std::size_t                line = 0;
  while (std::getline(in, text))
  {
    ++line;
    if (!text.empty() && text.back() == '\r')
    {
      text.pop_back();
    }
    if (text.find_first_not_of(" \t") == std::string::npos)
    {
      continue;
    }
    json j;
    try
    {
      j = json::parse(text);
    }
    catch (json::parse_error const &e)
    {
      schema_error(line, std::string("parse error: ") + e.what());
    }
    if (!j.is_object())
    {
      schema_error(line, "expected a JSON object");
    }

    AuctionRecord record;
    record.auction_id = string_field(j, "auction_id", line);
    auto const cands  = j.find("candidates");
    if (cands == j.end() || !cands->is_array())
    {
      schema_error(line, "field 'candidates' must be an array");
    }
    for (auto const &cj : *cands)
    {
      if (!cj.is_object())
      {
        schema_error(line, "candidate entries must be objects");
      }
      Candidate c;
      c.advertiser_id    = string_field(cj, "advertiser_id", line);
      c.bid              = number_field(cj, "bid", line);
      c.raw.ctr          = number_field(cj, "ctr", line);
      c.raw.memorability = number_field(cj, "memorability", line);
      c.raw.saliency     = number_field(cj, "saliency", line);

      bool const has_score = cj.contains("relevance");
      bool const has_text  = cj.contains("page_text") || cj.contains("ad_text");
      if (has_score == has_text)
      {
        schema_error(line, "field 'relevance': give either a score or page_text and ad_text");
      }
      if (has_score)
      {
        c.raw.relevance = number_field(cj, "relevance", line);
      }
      else
      {
        c.raw.relevance = TextPair{string_field(cj, "page_text", line), string_field(cj, "ad_text", line)};
      }
      check_candidate_fields(c, line);
      record.candidates.push_back(std::move(c));
    }
    finish_record(record, seen, line);
    out.push_back(std::move(record));
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 7> kCsvColumns = {"auction_id", "advertiser_id", "bid", "ctr",
                                                          "memorability", "saliency", "relevance"};

std::vector<std::string> split_csv_line(std::string const &text)
{
  std::vector<std::string> fields;
  std::string              field;
  std::istringstream       ss(text);
  while (std::getline(ss, field, ','))
  {
    fields.push_back(field);
  }
  if (!text.empty() && text.back() == ',')
  {
    fields.emplace_back();
  }
  return fields;
}

std::string trim(std::string s)
{
  auto const first = s.find_first_not_of(" \t\r");
  auto const last  = s.find_last_not_of(" \t\r");
  return first == std::string::npos ? std::string{} : s.substr(first, last - first + 1);
}

}  // namespace

std::vector<AuctionRecord> read_csv(std::istream &in)
{
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text))
  {
    ++line;
    if (!trim(text).empty())
    {
      break;
    }
  }
  if (trim(text).empty())
  {
    return {};
  }

  std::map<std::string, std::size_t> column;
  auto const                         header = split_csv_line(text);
  for (std::size_t i = 0; i < header.size(); ++i)
  {
    column[trim(header[i])] = i;
  }
  for (auto const name : kCsvColumns)
  {
    if (!column.contains(std::string(name)))
    {
      schema_error(line, "missing column '" + std::string(name) + "'");
    }
  }

  std::vector<AuctionRecord> out;
  std::set<std::string>      seen;
  std::size_t                record_line = 0;
  while (std::getline(in, text))
  {
    ++line;
    if (trim(text).empty())
    {
      continue;
    }
    auto const fields = split_csv_line(text);
    if (fields.size() != header.size())
    {
      schema_error(line, "expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
    }
    auto const get    = [&](std::string_view name) { return trim(fields[column.at(std::string(name))]); };
    auto const number = [&](std::string_view name) {
      auto const v = parse_number(get(name));
      if (!v)
      {
        schema_error(line, "field '" + std::string(name) + "' is not a number");
      }
      return *v;
    };

    Candidate c;
    c.advertiser_id    = get("advertiser_id");
    c.bid              = number("bid");
    c.raw.ctr          = number("ctr");
    c.raw.memorability = number("memorability");
    c.raw.saliency     = number("saliency");
    c.raw.relevance    = number("relevance");
    check_candidate_fields(c, line);

    auto const auction_id = get("auction_id");
    if (out.empty() || out.back().auction_id != auction_id)
    {
      if (!out.empty())
      {
        finish_record(out.back(), seen, record_line);
      }
      out.push_back(AuctionRecord{auction_id, {}});
      record_line = line;
    }
    out.back().candidates.push_back(std::move(c));
  }
  if (!out.empty())
  {
    finish_record(out.back(), seen, record_line);
  }
  return out;
}

void write_jsonl(std::span<AuctionRecord const> dataset, std::ostream &out)
{
  for (auto const &record : dataset)
  {
    nlohmann::ordered_json j;
    j["auction_id"] = record.auction_id;
    auto &cands     = j["candidates"];
    cands           = nlohmann::ordered_json::array();
    for (auto const &c : record.candidates)
    {
      nlohmann::ordered_json cj;
      cj["advertiser_id"] = c.advertiser_id;
      cj["bid"]           = c.bid;
      cj["ctr"]           = c.raw.ctr;
      cj["memorability"]  = c.raw.memorability;
      cj["saliency"]      = c.raw.saliency;
      if (auto const *score = std::get_if<double>(&c.raw.relevance))
      {
        cj["relevance"] = *score;
      }
      else
      {
        auto const &text = std::get<TextPair>(c.raw.relevance);
        cj["page_text"]  = text.page_text;
        cj["ad_text"]    = text.ad_text;
      }
      cands.push_back(std::move(cj));
    }
    out << j.dump() << '\n';
  }
}

void write_csv(std::span<AuctionRecord const> dataset, std::ostream &out)
{
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i)
  {
    out << (i ? "," : "") << kCsvColumns[i];
  }
  out << '\n';
  for (auto const &record : dataset)
  {
    if (record.auction_id.find(',') != std::string::npos)
    {
      throw ValidationError("auction_id '" + record.auction_id + "' cannot be written to CSV");
    }
    for (auto const &c : record.candidates)
    {
      auto const *score = std::get_if<double>(&c.raw.relevance);
      if (score == nullptr)
      {
        throw ValidationError("text-pair relevance is not supported in CSV (auction '" + record.auction_id + "')");
      }
      if (c.advertiser_id.find(',') != std::string::npos)
      {
        throw ValidationError("advertiser_id '" + c.advertiser_id + "' cannot be written to CSV");
      }
      out << record.auction_id << ',' << c.advertiser_id << ',' << format_number(c.bid) << ','
          << format_number(c.raw.ctr) << ',' << format_number(c.raw.memorability) << ','
          << format_number(c.raw.saliency) << ',' << format_number(*score) << '\n';
    }
  }
}

std::vector<AuctionRecord> load_dataset(std::filesystem::path const &path, DataFormat format)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error("cannot open '" + path.string() + "'");
  }
  try
  {
    return format == DataFormat::Csv ? read_csv(in) : read_jsonl(in);
  }
  catch (ValidationError const &e)
  {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_dataset(std::span<AuctionRecord const> dataset, std::filesystem::path const &path, DataFormat format)
{
  std::ostringstream buffer;
  if (format == DataFormat::Csv)
  {
    write_csv(dataset, buffer);
  }
  else
  {
    write_jsonl(dataset, buffer);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << buffer.str();
  if (!out)
  {
    throw Error("cannot write '" + path.string() + "'");
  }
}

std::string fingerprint(std::span<AuctionRecord const> dataset)
{
  std::ostringstream text;
  write_jsonl(dataset, text);
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char const c : text.str())
  {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::vector<std::size_t>> split_folds(std::size_t n, std::size_t k, std::uint64_t seed)
{
  if (k < 2)
  {
    throw ValidationError("number of folds must be >= 2");
  }
  if (n < k)
  {
    throw ValidationError("too few auctions: " + std::to_string(n) + " for " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::vector<std::size_t>> folds(k);
  std::size_t                           pos = 0;
  for (std::size_t f = 0; f < k; ++f)
  {
    std::size_t const size = n / k + (f < n % k ? 1 : 0);
    folds[f].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                    order.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

}  // namespace rtbopt
