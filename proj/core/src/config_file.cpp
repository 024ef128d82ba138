#include "mrr/config_file.hpp"

#include <fstream>
#include <sstream>

#include "mrr/errors.hpp"
#include "mrr/json_codec.hpp"

namespace mrr {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

Json parse_key_values(std::string_view text) {
  Json root = Json::object();
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view raw = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (raw.empty()) throw ConfigError(where + ": missing value for '" + std::string(key) + "'");

    Json value = Json::parse(raw.begin(), raw.end(), nullptr, false);
    if (value.is_discarded()) value = std::string(raw);

    Json* node = &root;
    std::string_view rest = key;
    for (;;) {
      const auto dot = rest.find('.');
      const std::string part(rest.substr(0, dot));
      if (part.empty()) throw ConfigError(where + ": malformed key '" + std::string(key) + "'");
      if (dot == std::string_view::npos) {
        (*node)[part] = value;
        break;
      }
      Json& child = (*node)[part];
      if (child.is_null()) child = Json::object();
      if (!child.is_object()) {
        throw ConfigError(where + ": '" + std::string(key) + "' conflicts with an earlier value");
      }
      node = &child;
      rest = rest.substr(dot + 1);
    }
  }
  return root;
}

}  // namespace

GameConfig parse_game_config(std::string_view text) {
  const std::string_view body = trim(text);
  Json j;
  if (!body.empty() && body.front() == '{') {
    try {
      j = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
      throw ConfigError("line " + std::to_string(line_of_offset(text, e.byte)) +
                        ": invalid JSON (" + e.what() + ")");
    }
  } else {
    j = parse_key_values(text);
  }
  GameConfig cfg;
  try {
    cfg = read_game_config(JsonReader(j, "", true));
  } catch (const DecodeError& e) {
    throw ConfigError(e.what());
  }
  cfg.validate();
  return cfg;
}

GameConfig load_game_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_game_config(ss.str());
}

}  // namespace mrr
