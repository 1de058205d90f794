#pragma once

namespace eas {

// Full command-line entry point (verbs: gen, fit, eval, experiment,
// inspect). Returns the process exit code: 0 success, 2 configuration
// error, 3 data error, 4 runtime error. Kept in the library so tests can
// drive it in-process.
int cli_main(int argc, const char* const* argv);

}  // namespace eas
