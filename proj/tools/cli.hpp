#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ssblab/io.hpp"

namespace ssblab::cli {

using Json = io::Json;

enum ExitCode : int {
  kSuccess = 0,
  kInternalError = 1,
  kValidationError = 2,
  kContractViolation = 3,
};

/// Parses argv (without the program name) and runs one subcommand.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

/// Flat JSON object from `path`. An empty file yields {}. Malformed input
/// throws ValidationError naming the line and column.
Json load_config(const std::filesystem::path& path);

/// Runs `subcommand` with a complete parameter set, writes its data files
/// and manifest.json into `out_dir`, and returns the manifest.
Json run_subcommand(const std::string& subcommand, const Json& params,
                    const std::filesystem::path& out_dir, std::ostream& out);

/// Parameters with defaults filled in; unknown keys are reported to `warn`
/// and dropped, missing required ones throw ValidationError.
Json complete_parameters(const std::string& subcommand, const Json& given,
                         std::ostream& warn);

std::vector<std::string> subcommand_names();

/// Output directory: explicit value, else $SSBLAB_OUT_DIR, else "ssblab-out".
std::filesystem::path resolve_out_dir(const std::string& explicit_dir);

}  // namespace ssblab::cli
