#pragma once

#include <string>
#include <string_view>

#include "archconf/errors.hpp"

namespace archconf {

// Lowercases, collapses every run of characters outside [a-z0-9] into one
// hyphen and trims hyphens at both ends. "__API__Gateway__" -> "api-gateway".
inline std::string normalize_name(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  bool pending_hyphen = false;
  for (char ch : raw) {
    char c = ch;
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    const bool keep = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    if (!keep) {
      pending_hyphen = !out.empty();
      continue;
    }
    if (pending_hyphen) out.push_back('-');
    pending_hyphen = false;
    out.push_back(c);
  }
  if (out.empty()) throw EmptyAfterNormalization(std::string(raw));
  return out;
}

}  // namespace archconf
