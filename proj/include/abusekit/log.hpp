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


#pragma once

#include <memory>
#include <string>

#include "spdlog/spdlog.h"

namespace abusekit {

/// The library logger ("abusekit"), writing to stderr. Created on first use
/// with the level named by ABUSEKIT_LOG, or "warn" when unset.
std::shared_ptr<spdlog::logger> logger();

/// Sets the logger level from `configured` (falling back to "warn");
/// ABUSEKIT_LOG takes precedence. Throws InvalidArgument on unknown names.
void configure_logging(const std::string& configured);

}  // namespace abusekit
