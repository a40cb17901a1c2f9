#pragma once

#include "cvqkd/sweep.hpp"

#include <filesystem>
#include <json.hpp>

namespace cvqkd::cli {

/// Reads a sweep specification. Unknown keys and malformed values raise
/// ConfigError. A relative `beta_table` path is resolved against `base_dir`.
sweep::SweepSpec spec_from_json(const nlohmann::json& doc,
                                const std::filesystem::path& base_dir = {});
sweep::SweepSpec load_spec(const std::filesystem::path& path);

/// Round-trips through spec_from_json except for the beta table, which is
/// written inline as [[snr, beta], ...].
nlohmann::json spec_to_json(const sweep::SweepSpec& spec);

/// "name=value".
std::pair<std::string, double> parse_assignment(const std::string& text);
/// "name:min:max:steps[:linear|log]".
sweep::Axis parse_axis(const std::string& text);

}  // namespace cvqkd::cli
