#pragma once

#include <iosfwd>
#include <vector>

#include "cmaflow/identities.hpp"

namespace cmaflow {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotConverged = 2;

/// Runs `cmaflow <subcommand> ...`. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

inline constexpr const char* kIdentitiesVersionLine = "# cmaflow-identities v1";

void write_identity_reports(std::ostream& out, const std::vector<IdentityReport>& reports);

/// Upper bound on concurrent runs: CMAFLOW_THREADS if set and positive,
/// otherwise the hardware concurrency.
unsigned thread_cap();

}  // namespace cmaflow
