#pragma once

#include "config.hpp"

#include <iosfwd>

namespace lvw::cli {

// Executes a validated configuration.  Files land in config.output_dir; short
// progress lines and the self-test report go to `out`.  Returns the exit status.
int run(const RunConfig& config, std::ostream& out);

// Maps an exception escaping parse_config or run to an exit status and writes
// the machine-readable error record to `err`.
int report_error(std::ostream& err);

} // namespace lvw::cli
