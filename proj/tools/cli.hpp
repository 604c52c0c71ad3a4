#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "bugchat/model/execution_model.hpp"

namespace bugchat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Raised for bad command-line input; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "START", or an unambiguous hex prefix of at least 8 characters.
model::Fingerprint resolve_fingerprint(const model::AppExecutionModel& model,
                                       const std::string& text);

/// Runs one command; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bugchat::cli
