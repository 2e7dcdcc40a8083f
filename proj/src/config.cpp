#include "lrsim/config.hpp"

#include <fstream>
#include <sstream>

namespace lrsim {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

const Config::Entry* Config::Section::find(const std::string& key) const {
  for (const Entry& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

const Config::Section* Config::find(const std::string& name) const {
  for (const Section& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

Config parse_config(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  Config::Section* current = nullptr;

  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw config_error("line " + std::to_string(lineno) + ": unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty())
        throw config_error("line " + std::to_string(lineno) + ": empty section name");
      if (cfg.find(name))
        throw config_error("line " + std::to_string(lineno) + ": duplicate section [" + name + "]");
      cfg.sections.push_back({name, lineno, {}});
      current = &cfg.sections.back();
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error("line " + std::to_string(lineno) + ": empty key");
    if (!current)
      throw config_error("line " + std::to_string(lineno) + ": key '" + key +
                         "' outside any [section]");
    if (current->find(key))
      throw config_error("line " + std::to_string(lineno) + ": duplicate key '" + key +
                         "' in [" + current->name + "]");
    current->entries.push_back({key, value, lineno});
  }
  return cfg;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace lrsim
