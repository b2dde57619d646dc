#include "rtbopt/numbers.hpp"

#include <array>
#include <charconv>

namespace rtbopt {

std::string format_number(double value)
{
  std::array<char, 64> buf{};
  auto const [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), end);
}

std::optional<double> parse_number(std::string_view text)
{
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
  {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
  {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+')
  {
    text.remove_prefix(1);
  }
  if (text.empty())
  {
    return std::nullopt;
  }
  double value     = 0.0;
  auto const [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || p != text.data() + text.size())
  {
    return std::nullopt;
  }
  return value;
}

}  // namespace rtbopt
