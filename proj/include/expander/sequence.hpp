#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "expander/error.hpp"

namespace expander {

/// Smallest sequence length for which the order/index multigraph is defined.
inline constexpr std::size_t kMinSequenceLength = 3;

/// An ordered list of finite sample values plus a label naming their origin.
class Sequence {
 public:
  Sequence() = default;
  Sequence(std::vector<double> values, std::string label)
      : values_(std::move(values)), label_(std::move(label)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw Error("sequence '" + label_ + "': value at position " + std::to_string(i + 1) +
                    " is not finite");
      }
    }
  }

  const std::vector<double>& values() const noexcept { return values_; }
  const std::string& label() const noexcept { return label_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Throws unless the sequence is long enough to build a graph from.
  void require_graphable() const {
    if (values_.size() < kMinSequenceLength) {
      throw Error("sequence '" + label_ + "' has fewer than 3 values (" +
                  std::to_string(values_.size()) + ")");
    }
  }

  /// First `n` values; the whole sequence when n is 0 or exceeds the size.
  Sequence prefix(std::size_t n) const {
    if (n == 0 || n >= values_.size()) return *this;
    return Sequence(std::vector<double>(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(n)),
                    label_);
  }

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<double> values_;
  std::string label_;
};

enum class InputFormat { kOnePerLine, kCsvSingleColumn };

inline InputFormat parse_input_format(std::string_view token) {
  if (token == "lines" || token == "one-per-line") return InputFormat::kOnePerLine;
  if (token == "csv" || token == "csv-single-column") return InputFormat::kCsvSingleColumn;
  throw Error("unknown input format '" + std::string(token) + "'");
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline double parse_real(std::string_view token, std::size_t line) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (token.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw Error("line " + std::to_string(line) + ": cannot parse '" + std::string(token) +
                "' as a real number");
  }
  return value;
}

}  // namespace detail

/// Reads sample values, preserving order. Blank lines and lines starting
/// with '#' are skipped. In csv mode each record must hold exactly one
/// field; a single trailing comma is tolerated.
inline Sequence parse_sequence(std::istream& in, InputFormat format, std::string label = "input") {
  std::vector<double> values;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (format == InputFormat::kCsvSingleColumn) {
      const auto comma = line.find(',');
      if (comma != std::string_view::npos) {
        if (!detail::trim(line.substr(comma + 1)).empty()) {
          throw Error("line " + std::to_string(line_no) + ": expected a single column");
        }
        line = detail::trim(line.substr(0, comma));
      }
    }
    values.push_back(detail::parse_real(line, line_no));
  }
  Sequence seq(std::move(values), std::move(label));
  seq.require_graphable();
  return seq;
}

inline Sequence parse_sequence(std::string_view text, InputFormat format, std::string label = "input") {
  std::istringstream in{std::string(text)};
  return parse_sequence(in, format, std::move(label));
}

/// Shortest text that parses back to exactly `v`; integral values print
/// without exponent or decimal point.
inline std::string format_value(double v) {
  if (std::nearbyint(v) == v && std::fabs(v) < 0x1.0p53) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace expander
