#pragma once

namespace heatsift {

// Entry point shared by the heatsift binary and the in-process CLI tests.
// Returns the process exit code (0 ok, 2 usage, 3 data, 4 numeric).
int run_cli(int argc, const char* const* argv);

}  // namespace heatsift
