#pragma once

#include <string>

#include "shiftdyn/config.hpp"
#include "shiftdyn/report.hpp"

namespace shiftdyn {

/// Dispatch one subcommand against a validated config and assemble its
/// deterministic report. Checker preconditions surface as exceptions.
RunReport run_subcommand(const std::string& subcommand, const RunConfig& cfg);

}  // namespace shiftdyn
