#include "kscrit/config.hpp"

#include <fstream>
#include <sstream>

#include "kscrit/errors.hpp"

namespace kscrit {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

ConfigFile ConfigFile::parse_string(const std::string& text) {
  ConfigFile cfg;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw invalid_input("config: unterminated section header at line " +
                            std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      cfg.data_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw invalid_input("config: expected key = value at line " + std::to_string(line_no));
    if (section.empty())
      throw invalid_input("config: entry before any [section] at line " +
                          std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw invalid_input("config: empty key at line " + std::to_string(line_no));
    cfg.data_[section][key] = value;
  }
  return cfg;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  return s != data_.end() && s->second.count(key) > 0;
}

std::string ConfigFile::get(const std::string& section, const std::string& key) const {
  auto s = data_.find(section);
  if (s != data_.end()) {
    auto k = s->second.find(key);
    if (k != s->second.end()) return k->second;
  }
  throw invalid_input("config: missing [" + section + "] " + key);
}

std::string ConfigFile::get_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double ConfigFile::get_double(const std::string& section, const std::string& key) const {
  const std::string raw = get(section, key);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    throw invalid_input("config: [" + section + "] " + key + " is not a number: " + raw);
  }
  if (used != raw.size())
    throw invalid_input("config: [" + section + "] " + key + " has trailing junk: " + raw);
  return v;
}

double ConfigFile::get_double_or(const std::string& section, const std::string& key,
                                 double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

int ConfigFile::get_int_or(const std::string& section, const std::string& key,
                           int fallback) const {
  if (!has(section, key)) return fallback;
  const double v = get_double(section, key);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw invalid_input("config: [" + section + "] " + key + " must be an integer");
  return i;
}

std::vector<double> ConfigFile::get_list(const std::string& section,
                                         const std::string& key) const {
  const std::string raw = get(section, key);
  std::vector<double> out;
  std::istringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty())
      throw invalid_input("config: empty list entry in [" + section + "] " + key);
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw invalid_input("config: bad list entry '" + item + "' in [" + section + "] " +
                          key);
    }
  }
  if (out.empty()) throw invalid_input("config: empty list in [" + section + "] " + key);
  return out;
}

}  // namespace kscrit
