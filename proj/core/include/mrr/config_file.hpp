#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mrr/game_core.hpp"

namespace mrr {

// Parses a game config from text. JSON objects are detected by a leading
// '{'; anything else is read as `dotted.key = value` lines, where '#' starts
// a comment and values are JSON literals or bare strings. Every default can
// be overridden. Throws ConfigError with a line number or field path.
GameConfig parse_game_config(std::string_view text);

GameConfig load_game_config(const std::filesystem::path& path);

}  // namespace mrr
