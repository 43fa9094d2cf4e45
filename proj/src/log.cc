// Copyright 2026 The abusekit Authors. All Rights Reserved.
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


#include "abusekit/log.hpp"

#include <cstdlib>

#include "abusekit/error.hpp"
#include "spdlog/sinks/stdout_color_sinks.h"

namespace abusekit {

namespace {

std::string env_level() {
  const char* env = std::getenv("ABUSEKIT_LOG");
  return env != nullptr ? std::string(env) : std::string();
}

spdlog::level::level_enum parse_level(const std::string& level) {
  const auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && level != "off") throw InvalidArgument("unknown log level '" + level + "'");
  return parsed;
}

}  // namespace

std::shared_ptr<spdlog::logger> logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto l = spdlog::get("abusekit");
    if (!l) l = spdlog::stderr_color_mt("abusekit");
    const std::string level = env_level();
    try {
      l->set_level(parse_level(level.empty() ? "warn" : level));
    } catch (const InvalidArgument&) {
      l->set_level(spdlog::level::warn);
    }
    return l;
  }();
  return instance;
}

void configure_logging(const std::string& configured) {
  std::string level = configured.empty() ? "warn" : configured;
  if (const std::string env = env_level(); !env.empty()) level = env;
  logger()->set_level(parse_level(level));
}

}  // namespace abusekit
