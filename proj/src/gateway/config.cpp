// Copyright 2026 The Fusebox Authors
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

#include "fusebox/gateway/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "fusebox/core/error.hpp"

namespace fusebox {
namespace {

std::string_view trim(std::string_view text) {
  auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

long long parse_int(std::string_view key, std::string_view value) {
  long long out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || out < 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "config key '" + std::string(key) + "' expects a non-negative "
                "integer, got '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "on" || value == "true" || value == "yes" || value == "1")
    return true;
  if (value == "off" || value == "false" || value == "no" || value == "0")
    return false;
  throw Error(ErrorCode::kInvalidArgument,
              "config key '" + std::string(key) + "' expects on/off");
}

std::vector<std::string> split_words(std::string_view value) {
  std::vector<std::string> words;
  std::istringstream in{std::string(value)};
  std::string word;
  while (in >> word) words.push_back(word);
  return words;
}

}  // namespace

PlatformConfig parse_config(std::string_view text) {
  PlatformConfig config;
  bool merge_log_set = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_number = 0;
  while (std::getline(in, raw)) {
    ++line_number;
    auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "config line " + std::to_string(line_number) +
                      ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));

    if (key == "listen") {
      config.listen = Address::parse(value);
    } else if (key == "merger_listen") {
      config.merger_listen = Address::parse(value);
    } else if (key == "internal") {
      config.internal = AddressSet::parse(value);
    } else if (key == "health_timeout_ms") {
      config.health_timeout = std::chrono::milliseconds(parse_int(key, value));
    } else if (key == "drain_timeout_ms") {
      config.drain_timeout = std::chrono::milliseconds(parse_int(key, value));
    } else if (key == "proxy_timeout_ms") {
      config.proxy_timeout = std::chrono::milliseconds(parse_int(key, value));
    } else if (key == "fusion") {
      config.fusion = parse_bool(key, value);
    } else if (key == "fusion_threshold") {
      config.fusion_threshold = static_cast<int>(parse_int(key, value));
      if (config.fusion_threshold < 1) {
        throw Error(ErrorCode::kInvalidArgument, "fusion_threshold must be >= 1");
      }
    } else if (key == "handler_detection") {
      config.handler_detection = parse_bool(key, value);
    } else if (key == "sandbox_backend") {
      config.sandbox_backend = std::string(value);
    } else if (key == "handler_command") {
      config.handler_command = split_words(value);
    } else if (key == "workdir") {
      config.workdir = std::string(value);
    } else if (key == "merge_log") {
      config.merge_log = std::string(value);
      merge_log_set = true;
    } else if (key == "hop_delay_ms") {
      config.hop_delay_ms = static_cast<int>(parse_int(key, value));
    } else {
      throw Error(ErrorCode::kInvalidArgument,
                  "unknown config key '" + std::string(key) + "'");
    }
  }
  if (!merge_log_set && !config.workdir.empty()) {
    config.merge_log = config.workdir / "merge-events.jsonl";
  }
  return config;
}

PlatformConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace fusebox
