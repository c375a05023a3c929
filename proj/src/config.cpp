// Copyright 2026 The EDA Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eda/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eda
{
namespace
{

std::string trim(const std::string & text)
{
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string & text)
{
  std::vector<std::string> out;
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, ',')) {
    out.push_back(trim(token));
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::from_file(const std::string & path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path);
  }
  std::ostringstream content;
  content << in.rdbuf();
  return from_string(content.str(), path);
}

KeyValueConfig KeyValueConfig::from_string(const std::string & text, const std::string & origin)
{
  KeyValueConfig config;
  config.origin_ = origin;
  std::istringstream stream(text);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(
        origin + ":" + std::to_string(line_number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument(origin + ":" + std::to_string(line_number) + ": empty key");
    }
    config.values_[key] = trim(line.substr(eq + 1));
  }
  return config;
}

bool KeyValueConfig::has(const std::string & key) const
{
  touched_.insert(key);
  return values_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string & key, const std::string & fallback)
{
  touched_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_real(const std::string & key, double fallback)
{
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) {
    return fallback;
  }
  char * end = nullptr;
  const double value = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') {
    throw std::invalid_argument(origin_ + ": key '" + key + "' is not a real: " + it->second);
  }
  return value;
}

std::int64_t KeyValueConfig::get_int(const std::string & key, std::int64_t fallback)
{
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) {
    return fallback;
  }
  char * end = nullptr;
  const long long value = std::strtoll(it->second.c_str(), &end, 10);
  if (end == it->second.c_str() || *end != '\0') {
    throw std::invalid_argument(origin_ + ": key '" + key + "' is not an integer: " + it->second);
  }
  return value;
}

std::vector<double> KeyValueConfig::get_reals(
  const std::string & key, std::vector<double> fallback)
{
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) {
    return fallback;
  }
  std::vector<double> out;
  for (const auto & token : split_list(it->second)) {
    char * end = nullptr;
    const double value = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
      throw std::invalid_argument(origin_ + ": key '" + key + "' has a bad real: " + token);
    }
    out.push_back(value);
  }
  return out;
}

std::vector<int> KeyValueConfig::get_ints(const std::string & key, std::vector<int> fallback)
{
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) {
    return fallback;
  }
  std::vector<int> out;
  for (const auto & token : split_list(it->second)) {
    char * end = nullptr;
    const long long value = std::strtoll(token.c_str(), &end, 10);
    if (end == token.c_str() || *end != '\0') {
      throw std::invalid_argument(origin_ + ": key '" + key + "' has a bad integer: " + token);
    }
    out.push_back(static_cast<int>(value));
  }
  return out;
}

std::vector<std::string> KeyValueConfig::get_strings(
  const std::string & key, std::vector<std::string> fallback)
{
  touched_.insert(key);
  auto it = values_.find(key);
  if (it == values_.end()) {
    return fallback;
  }
  return split_list(it->second);
}

void KeyValueConfig::reject_unknown_keys() const
{
  for (const auto & [key, value] : values_) {
    if (touched_.count(key) == 0) {
      throw std::invalid_argument(origin_ + ": unknown config key '" + key + "'");
    }
  }
}

}  // namespace eda
