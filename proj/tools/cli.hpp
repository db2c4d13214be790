#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ugr::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kDataError = 2;
inline constexpr int kModelError = 3;

// Runs one `ugr` invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ugr::cli
