// core/src/manifest.cc
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

#include "aud/manifest.hpp"

#include <filesystem>
#include <fstream>

namespace aud {

namespace {
std::string Trim(const std::string &s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}
}  // namespace

Manifest Manifest::Load(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  Manifest m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 'key = value'");
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty())
      throw IoError(path + ":" + std::to_string(lineno) + ": empty key");
    m.entries_[key] = value;
  }
  return m;
}

void Manifest::Set(const std::string &key, const std::string &value) {
  entries_[key] = value;
}

bool Manifest::Has(const std::string &key) const {
  return entries_.count(key) > 0;
}

std::string Manifest::GetString(const std::string &key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw ValidationError("manifest key missing: " + key);
  return it->second;
}

std::string Manifest::GetString(const std::string &key,
                                const std::string &fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

int Manifest::GetInt(const std::string &key, int fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stoi(it->second);
  } catch (const std::exception &) {
    throw ValidationError("manifest key '" + key + "' is not an integer: " +
                          it->second);
  }
}

double Manifest::GetDouble(const std::string &key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception &) {
    throw ValidationError("manifest key '" + key + "' is not a number: " +
                          it->second);
  }
}

std::string Manifest::GetPath(const std::string &key) const {
  const std::string path = GetString(key);
  if (!std::filesystem::exists(path))
    throw IoError("manifest key '" + key + "' names a missing file: " + path);
  return path;
}

}  // namespace aud
