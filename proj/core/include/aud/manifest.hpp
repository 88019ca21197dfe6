// core/include/aud/manifest.hpp
//
// Copyright 2026  audkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AUD_MANIFEST_HPP_
#define AUD_MANIFEST_HPP_

#include <map>
#include <optional>
#include <string>

#include "aud/common.hpp"

namespace aud {

// Flat `key = value` configuration with '#' comments.  Command-line
// flags override manifest values; the manifest keeps multi-stage
// pipelines scriptable.
class Manifest {
 public:
  Manifest() = default;
  static Manifest Load(const std::string &path);

  void Set(const std::string &key, const std::string &value);
  bool Has(const std::string &key) const;

  std::string GetString(const std::string &key) const;
  std::string GetString(const std::string &key,
                        const std::string &fallback) const;
  int GetInt(const std::string &key, int fallback) const;
  double GetDouble(const std::string &key, double fallback) const;

  /// Like GetString, but also checks that the named file exists.
  std::string GetPath(const std::string &key) const;

  const std::map<std::string, std::string> &entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

}  // namespace aud

#endif  // AUD_MANIFEST_HPP_
