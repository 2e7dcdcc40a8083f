#pragma once

#include <string>
#include <vector>

#include "lrsim/errors.hpp"

namespace lrsim {

// Flat line-oriented configuration:
//   [section]
//   key = value      # comment
// Section names and keys must be unique. Values keep internal whitespace.
struct Config {
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };

  struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;

    const Entry* find(const std::string& key) const;
  };

  std::vector<Section> sections;

  const Section* find(const std::string& name) const;
};

Config parse_config(const std::string& text);
Config parse_config_file(const std::string& path);

}  // namespace lrsim
