#pragma once

// Command-line experiments: flow, verify, mathieu, tongues, bicycle, prytz.
//
// Exit codes: 0 success, 1 a residual above its threshold under --assert (or
// a numerical failure), 2 usage error. Output directory defaults to
// $ROLLCONES_OUT, then the current directory.

#include <string>
#include <vector>

namespace rollcones::cli {

inline constexpr const char* kOutEnv = "ROLLCONES_OUT";

int run(int argc, char** argv);

/// Same, with args excluding the program name.
int run(const std::vector<std::string>& args);

}  // namespace rollcones::cli
