#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace p2plab {

// Full command dispatch. Returns the process exit code: 0 on success, 1 on a
// contract violation (bad flags, bad config, invalid parameters), 2 on I/O
// failure. Never throws; output goes to the given streams so tests can run
// commands in-process.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace p2plab
