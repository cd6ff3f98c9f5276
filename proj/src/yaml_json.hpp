#pragma once

// YAML documents are read into nlohmann::json trees so that YAML and JSON
// inputs share one validation path.

#include <string>
#include <string_view>

#include "json.hpp"

namespace t2h::detail {

/// Throws ConfigError on YAML syntax errors.
nlohmann::json parse_yaml_or_json(std::string_view text);

std::string emit_yaml(const nlohmann::json& doc);

std::string read_text_file(const std::string& path);

}  // namespace t2h::detail
