#pragma once

// Command-line front end: check-params, run and sweep over a JSON config
// (one experiment per file).

#include "lpup/experiments.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpup::cli {

enum ExitCode : int { ok = 0, violation = 1, unknown = 2, numerical = 3, usage = 4 };

/// Malformed or unusable configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string experiment;
  Grid grid;
  Json params = Json::object();
  std::uint64_t seed = 0;
  std::string output_dir;  // empty: current directory
  Json tolerances = Json::object();

  /// Everything but output_dir, as stored in records.
  Json to_json() const;
};

std::vector<std::string> experiment_tags();

/// Throws ConfigError.
RunConfig parse_config(const Json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// Prints every hypothesis with its verdict.
int check_params(const RunConfig& config, std::ostream& out);

struct RunOutcome {
  int code = ExitCode::ok;
  std::optional<ExperimentRecord> record;
  std::filesystem::path path;  // empty when nothing was written
  std::string message;
};

/// Validates, runs and writes the record into out_dir.  Never throws for
/// configuration or numerical problems; they end up in `code` and `message`.
RunOutcome run(const RunConfig& config, const std::filesystem::path& out_dir);

/// One run per value of the dotted `axis` path into the config document,
/// each in its own subdirectory, plus sweep.json.  Member failures are
/// recorded and the sweep continues.  Returns the worst member exit code.
int sweep(const Json& doc, const std::string& axis, const std::vector<std::string>& values,
          const std::filesystem::path& out_dir, std::ostream& out, std::ostream& err);

/// Entry point of the lpup executable.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lpup::cli
