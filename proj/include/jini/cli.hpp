#pragma once

namespace jini {

// Entry point for the command-line tool.  Verbs: experiment, fit, simulate,
// report.  Exit codes: 0 success, 2 configuration or input error, 3
// numerical/estimation failure.  Progress goes to standard error; standard
// output carries only machine-readable CSV.
int run_cli(int argc, const char* const* argv);

}  // namespace jini
