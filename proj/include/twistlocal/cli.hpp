#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace twistlocal::cli {

// Exit statuses. verdict also uses 0/1/2 for Yes/No/Unknown.
inline constexpr int kExitOk = 0;
inline constexpr int kExitNo = 1;
inline constexpr int kExitUnknown = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitData = 65;
inline constexpr int kExitNoInput = 66;
inline constexpr int kExitBound = 69;
inline constexpr int kExitInternal = 70;

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

// Parses "a,b,-c"; plain decimal integers only.
std::vector<std::int64_t> parse_int_list(const std::string& text);
std::int64_t parse_int(const std::string& text);

}  // namespace twistlocal::cli
