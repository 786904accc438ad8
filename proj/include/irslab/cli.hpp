#pragma once

// Command-line surface: argument resolution (command line, then IRSLAB_ environment variables,
// then a key=value config file), dispatch to the library, RunRecord serialization and replay.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace irslab::cli {

inline constexpr const char* kToolVersion = "irslab 0.1.0";

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

/// Reads the process environment.
std::optional<std::string> process_env(const std::string& name);

struct Outcome {
    int exitCode = 0;
    std::string out;  // what the command prints on stdout
    std::string err;  // diagnostics for stderr
    nlohmann::json record;  // RunRecord; null for usage errors and replays
};

/// Runs one invocation; args excludes the program name. Never throws.
Outcome run(const std::vector<std::string>& args, const EnvLookup& env = process_env);

/// Recursive comparison: integers and non-numeric strings exactly, floating values (numbers or
/// numeric strings) within 1e-12 relative. Returns the JSON paths that differ.
std::vector<std::string> diff_outputs(const nlohmann::json& a, const nlohmann::json& b);

}  // namespace irslab::cli
