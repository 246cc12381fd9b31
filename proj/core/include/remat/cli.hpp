#pragma once

#include <iosfwd>

namespace remat {

// Full command-line front end; returns the process exit code.
//   0  success
//   1  analysis came back negative (FAIL verdict, failed certificate, ...)
//   2  bad input (parse errors, invalid arguments)
// Streams are injected so tests can capture output.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace remat
