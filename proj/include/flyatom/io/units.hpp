#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "flyatom/constants.hpp"
#include "flyatom/errors.hpp"

namespace flyatom::io {

enum class Quantity { Energy, Length, Temperature, Acceleration, Frequency, Mass, Time, Speed };

struct UnitDef {
  std::string_view suffix;
  int exp10;      // decimal prefix, applied in the text so "40uK" parses exactly as 40e-6
  double factor;  // SI value of the unprefixed unit
};

inline std::vector<UnitDef> units_for(Quantity q) {
  using namespace constants;
  switch (q) {
    case Quantity::Energy:
      return {{"J", 0, 1.0}, {"K", 0, boltzmann}, {"mK", -3, boltzmann}, {"uK", -6, boltzmann}};
    case Quantity::Length: return {{"m", 0, 1.0}, {"mm", -3, 1.0}, {"um", -6, 1.0}, {"nm", -9, 1.0}};
    case Quantity::Temperature: return {{"K", 0, 1.0}, {"mK", -3, 1.0}, {"uK", -6, 1.0}, {"nK", -9, 1.0}};
    case Quantity::Acceleration: return {{"m/s2", 0, 1.0}};
    case Quantity::Frequency: return {{"Hz", 0, 1.0}, {"kHz", 3, 1.0}};
    case Quantity::Mass: return {{"kg", 0, 1.0}, {"u", 0, atomic_mass_unit}};
    case Quantity::Time: return {{"s", 0, 1.0}, {"ms", -3, 1.0}, {"us", -6, 1.0}};
    case Quantity::Speed: return {{"m/s", 0, 1.0}};
  }
  return {};
}

/// Suffix used when writing values back out (always SI, so round trips are exact).
inline std::string_view si_suffix(Quantity q) {
  switch (q) {
    case Quantity::Energy: return "J";
    case Quantity::Length: return "m";
    case Quantity::Temperature: return "K";
    case Quantity::Acceleration: return "m/s2";
    case Quantity::Frequency: return "Hz";
    case Quantity::Mass: return "kg";
    case Quantity::Time: return "s";
    case Quantity::Speed: return "m/s";
  }
  return "";
}

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Parses "0.76mK", "12.6um", "40uK", "5e4m/s2"; the unit suffix is mandatory.
/// "Rb87" is accepted as a mass.
inline double parse_quantity(std::string_view text, Quantity q) {
  std::string s;
  for (char c : text)
    if (c != ' ') s.push_back(c);
  if (q == Quantity::Mass && s == "Rb87") return constants::rb87_mass;
  std::size_t split = 0;
  while (split < s.size() && (std::isdigit(static_cast<unsigned char>(s[split])) || s[split] == '.' ||
                              s[split] == '-' || s[split] == '+' || s[split] == 'e' || s[split] == 'E')) {
    // an 'e' not followed by a digit or sign starts a unit, not an exponent
    if ((s[split] == 'e' || s[split] == 'E') &&
        !(split + 1 < s.size() && (std::isdigit(static_cast<unsigned char>(s[split + 1])) || s[split + 1] == '-' ||
                                   s[split + 1] == '+')))
      break;
    ++split;
  }
  const std::string_view num(s.data(), split);
  const std::string_view unit(s.data() + split, s.size() - split);
  const auto v = parse_double(num);
  if (!v || !std::isfinite(*v)) throw ConfigError("cannot read a number from '" + std::string(text) + "'");
  if (unit.empty()) throw ConfigError("missing unit suffix in '" + std::string(text) + "'");
  for (const auto& u : units_for(q)) {
    if (u.suffix != unit) continue;
    if (u.exp10 == 0) return *v * u.factor;
    // shift the decimal exponent in the text, then round once
    std::string mant(num);
    int e = 0;
    const auto epos = mant.find_first_of("eE");
    if (epos != std::string::npos) {
      const auto ev = parse_double(std::string_view(mant).substr(epos + 1));
      if (!ev) throw ConfigError("cannot read a number from '" + std::string(text) + "'");
      e = static_cast<int>(*ev);
      mant.resize(epos);
    }
    const auto shifted = parse_double(mant + "e" + std::to_string(e + u.exp10));
    if (!shifted) throw ConfigError("cannot read a number from '" + std::string(text) + "'");
    return *shifted * u.factor;
  }
  std::string allowed;
  for (const auto& u : units_for(q)) allowed += (allowed.empty() ? "" : ", ") + std::string(u.suffix);
  throw ConfigError("unit '" + std::string(unit) + "' in '" + std::string(text) + "' is not one of: " + allowed);
}

inline std::string format_quantity(double value, Quantity q) {
  return format_double(value) + std::string(si_suffix(q));
}

/// Comma list "0.1,0.2,0.3" or generated grid "lin:start:stop:count" /
/// "log:start:stop:count".
inline std::vector<double> parse_grid(std::string_view text) {
  auto fail = [&](const std::string& why) { return ConfigError("malformed grid '" + std::string(text) + "': " + why); };
  auto split = [](std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i)
      if (i == s.size() || s[i] == sep) {
        parts.push_back(s.substr(start, i - start));
        start = i + 1;
      }
    return parts;
  };
  std::vector<double> out;
  if (text.starts_with("lin:") || text.starts_with("log:")) {
    const bool log = text.starts_with("log:");
    const auto parts = split(text.substr(4), ':');
    if (parts.size() != 3) throw fail("expected kind:start:stop:count");
    const auto a = parse_double(parts[0]);
    const auto b = parse_double(parts[1]);
    const auto n = parse_double(parts[2]);
    if (!a || !b || !n) throw fail("non-numeric field");
    if (*n < 2 || *n != std::floor(*n) || *n > 1e6) throw fail("count must be an integer in [2, 1e6]");
    if (!(*b > *a)) throw fail("stop must exceed start");
    if (log && !(*a > 0.0)) throw fail("log grid needs start > 0");
    const int count = static_cast<int>(*n);
    for (int i = 0; i < count; ++i) {
      const double f = static_cast<double>(i) / (count - 1);
      out.push_back(log ? *a * std::pow(*b / *a, f) : *a + (*b - *a) * f);
    }
    out.back() = *b;
  } else {
    for (auto p : split(text, ',')) {
      const auto v = parse_double(p);
      if (!v || !std::isfinite(*v)) throw fail("'" + std::string(p) + "' is not a number");
      out.push_back(*v);
    }
  }
  if (out.empty()) throw fail("no values");
  for (std::size_t i = 1; i < out.size(); ++i)
    if (!(out[i] > out[i - 1])) throw fail("values must be strictly increasing");
  return out;
}

}  // namespace flyatom::io
