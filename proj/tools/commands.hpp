#pragma once

#include "vineuq/io.hpp"
#include "vineuq/serialize.hpp"

#include <exception>
#include <optional>
#include <string>

namespace vuq::cli {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumerical = 3 };

struct Outcome {
    /// schema_version, version, command, seed, config_hash, config, result
    Json envelope;
    /// Set for commands whose primary output is a table (sample, rosenblatt, sweeps).
    std::optional<CsvTable> table;
};

/// Runs one command with fully resolved options (flags already merged into
/// the config object). Throws the library's error types.
Outcome run(const std::string& command, const Json& options);

/// Maps an exception to the documented exit code.
int exit_code_for(const std::exception& e);

/// Options that do not change results and are excluded from the config hash.
bool is_presentation_key(const std::string& key);

}  // namespace vuq::cli
