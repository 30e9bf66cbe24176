#pragma once

namespace ffspin::cli {

// Full command-line interface (check | expect | groundspace | estimate |
// sweep | ed).  Returns the process exit code: 0 success, 1 parse/validation
// failure, 2 frustrated input where a frustration-free one is required,
// 3 input outside the natural class.
int run(int argc, const char* const* argv);

}  // namespace ffspin::cli
