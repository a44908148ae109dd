#pragma once

#include <string>
#include <vector>

namespace bridgelab {

// Full command-line entry point. Exit codes: 0 success, 2 configuration or
// argument error, 3 numeric divergence, 4 I/O failure. The BRIDGELAB_THREADS
// environment variable caps worker threads for sampling and probe fan-out.
int cli_main(const std::vector<std::string>& args);
int cli_main(int argc, const char* const* argv);

}  // namespace bridgelab
