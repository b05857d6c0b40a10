#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ideoaudit::app {

/// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kInternalError = 1,
  kConfigError = 2,
  kGatewayError = 3,
  kParseExhausted = 4,
  kValidationError = 5,
  kTooFewPairs = 6,
  kArtifactExists = 7,
};

/// Workspace layout: {root}/{cache,trees,datasets,evals,reports}/.
struct Workspace {
  std::string root;

  /// --workspace, else $IDEOAUDIT_WORKSPACE, else ./ideoaudit-workspace.
  static Workspace resolve(const std::string& flag);
  std::string dir(const std::string& sub) const;
  void ensure() const;
};

/// UTC timestamp plus a slug, e.g. 20261016T120000Z-tree-build.
std::string make_run_id(const std::string& slug);

/// Runs the CLI with argv-style arguments (args[0] is the program name).
/// Data goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ideoaudit::app
