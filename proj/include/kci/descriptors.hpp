#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kci/errors.hpp"
#include "kci/evolution.hpp"

namespace kci {

// Text descriptors for the built-in coefficient families, "name" or
// "name:p1,p2,...". These are the CLI surface for a and beta; anything beyond
// the named families goes through the beta table.

namespace detail {

inline std::pair<std::string, std::string> split_descriptor(const std::string& desc) {
  auto colon = desc.find(':');
  if (colon == std::string::npos) return {desc, ""};
  return {desc.substr(0, colon), desc.substr(colon + 1)};
}

inline double parse_number(const std::string& text, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(text, &pos);
    require(pos == text.size(), what + ": trailing characters in '" + text + "'");
    return v;
  } catch (const validation_error&) {
    throw;
  } catch (const std::exception&) {
    throw validation_error(what + ": cannot parse number '" + text + "'");
  }
}

inline std::vector<std::string> split_on(const std::string& text, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t p = text.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, p - start));
    start = p + 1;
  }
}

inline std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  if (text.empty()) return out;
  for (const auto& tok : split_on(text, ',')) out.push_back(parse_number(tok, what));
  return out;
}

}  // namespace detail

// constant:c | saturating | rational
inline DiffusivitySpec parse_diffusivity(const std::string& desc) {
  auto [name, rest] = detail::split_descriptor(desc);
  auto params = detail::parse_numbers(rest, "diffusivity descriptor");
  if (name == "constant") {
    require(params.size() == 1, "diffusivity 'constant' needs exactly one parameter, e.g. constant:1.5");
    return diffusivity_constant(params[0]);
  }
  if (name == "saturating") {
    require(params.empty(), "diffusivity 'saturating' takes no parameters");
    return diffusivity_saturating();
  }
  if (name == "rational") {
    require(params.empty(), "diffusivity 'rational' takes no parameters");
    return diffusivity_rational();
  }
  throw validation_error("unknown diffusivity '" + name +
                         "' (known: constant:c, saturating, rational)");
}

// constant:b | sinusoidal:b1,b2,omega | table:t0,v0;t1,v1;...
inline ForcingSpec parse_beta(const std::string& desc, double lambda) {
  auto [name, rest] = detail::split_descriptor(desc);
  if (name == "constant") {
    auto params = detail::parse_numbers(rest, "beta descriptor");
    require(params.size() == 1, "beta 'constant' needs exactly one parameter, e.g. constant:1");
    return ForcingSpec::constant(lambda, params[0]);
  }
  if (name == "sinusoidal") {
    auto params = detail::parse_numbers(rest, "beta descriptor");
    require(params.size() == 3,
            "beta 'sinusoidal' needs b1,b2,omega, e.g. sinusoidal:1,2,1");
    return ForcingSpec::sinusoidal(lambda, params[0], params[1], params[2]);
  }
  if (name == "table") {
    std::vector<std::pair<double, double>> knots;
    for (const auto& pair_text : detail::split_on(rest, ';')) {
      auto nums = detail::parse_numbers(pair_text, "beta table knot");
      require(nums.size() == 2, "beta table knots are t,v pairs separated by ';'");
      knots.emplace_back(nums[0], nums[1]);
    }
    return ForcingSpec::table(lambda, std::move(knots));
  }
  throw validation_error("unknown beta '" + name +
                         "' (known: constant:b, sinusoidal:b1,b2,omega, table:t,v;t,v;...)");
}

}  // namespace kci
