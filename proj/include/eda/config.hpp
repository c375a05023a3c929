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

#ifndef EDA__CONFIG_HPP_
#define EDA__CONFIG_HPP_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace eda
{

/// Flat key=value text config. '#' starts a comment; blank lines are
/// ignored. Lookups record the touched keys so unknown keys can be
/// rejected by name.
class KeyValueConfig
{
public:
  KeyValueConfig() = default;

  static KeyValueConfig from_file(const std::string & path);
  static KeyValueConfig from_string(const std::string & text, const std::string & origin);

  bool has(const std::string & key) const;
  std::string get_string(const std::string & key, const std::string & fallback);
  double get_real(const std::string & key, double fallback);
  std::int64_t get_int(const std::string & key, std::int64_t fallback);
  std::vector<double> get_reals(const std::string & key, std::vector<double> fallback);
  std::vector<int> get_ints(const std::string & key, std::vector<int> fallback);
  std::vector<std::string> get_strings(
    const std::string & key, std::vector<std::string> fallback);

  /// Throws naming the first key that was never requested.
  void reject_unknown_keys() const;

private:
  std::string origin_;
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> touched_;
};

}  // namespace eda

#endif  // EDA__CONFIG_HPP_
