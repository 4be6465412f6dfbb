#pragma once

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>

namespace edwsvr {

// Shortest round-trip decimal form; parsing it back yields the same bits.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

// Strict parse of a full token. Accepts nan/inf syntactically; callers that
// require finite values must check afterwards.
inline bool try_parse_double(std::string_view tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && !tok.empty();
}

inline bool try_parse_long(std::string_view tok, long& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && !tok.empty();
}

}  // namespace edwsvr
