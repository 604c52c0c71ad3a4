#pragma once

#include <functional>
#include <string>

namespace bugchat {

/// Source of ISO-8601 UTC timestamps; injectable so outputs can be pinned.
using Clock = std::function<std::string()>;

/// Current time as "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

inline Clock system_clock() { return &utc_timestamp; }

inline Clock fixed_clock(std::string value) {
  return [value = std::move(value)] { return value; };
}

}  // namespace bugchat
