#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace faceseg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitJobFailure = 1;
inline constexpr int kExitUsage = 2;

int run(int argc, char** argv);
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace faceseg::cli
